use std::fmt::Write as _;
use std::io::Write;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::{BoxStats, EvolverConfig};
use crate::graphfeat::BoxKey;

use super::ranktest::{rank_test, Alternative, Winner};
use super::{mean_std, median};

/// Identifies a run within a campaign.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunMeta {
    pub run_id: String,
    /// Display name such as `QD [all]`.
    pub evolver: String,
    pub feature_set: String,
    pub direction: String,
    pub seed: u64,
    pub n: usize,
}

impl RunMeta {
    pub fn from_config(config: &EvolverConfig) -> Self {
        Self {
            run_id: config.run_id(),
            evolver: config.display_name(),
            feature_set: config.feature_set.id().to_string(),
            direction: config.objective.direction(),
            seed: config.seed,
            n: config.n,
        }
    }

    fn cell(&self) -> (String, String) {
        (self.feature_set.clone(), self.direction.clone())
    }
}

/// Aggregate statistics of one run's final archive.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub meta: RunMeta,
    pub boxes_covered: u64,
    /// Boxes below the pooled median of their (feature set, direction)
    /// cell; filled in by [`annotate_below_median`].
    pub below_median_count: u64,
    pub max_updates: u64,
    pub max_hits: u64,
    pub best_objective: f64,
    pub median_objective: f64,
    pub objectives: Vec<f64>,
}

pub fn summarize_run(meta: RunMeta, stats: &IndexMap<BoxKey, BoxStats>) -> Result<RunSummary> {
    if stats.is_empty() {
        return Err(Error::EmptyArchive);
    }
    let objectives: Vec<f64> = stats.values().map(|s| s.objective).collect();
    Ok(RunSummary {
        meta,
        boxes_covered: stats.len() as u64,
        below_median_count: 0,
        max_updates: stats.values().map(|s| s.updates).max().unwrap_or(0),
        max_hits: stats.values().map(|s| s.hits).max().unwrap_or(0),
        best_objective: objectives.iter().copied().fold(f64::INFINITY, f64::min),
        median_objective: median(&objectives).expect("nonempty"),
        objectives,
    })
}

/// Median objective over the boxes of all runs of all evolvers, per
/// (feature set, direction).
pub fn pooled_medians(summaries: &[RunSummary]) -> IndexMap<(String, String), f64> {
    let mut pooled: IndexMap<(String, String), Vec<f64>> = IndexMap::new();
    for s in summaries {
        pooled
            .entry(s.meta.cell())
            .or_default()
            .extend_from_slice(&s.objectives);
    }
    pooled
        .into_iter()
        .filter_map(|(cell, v)| median(&v).map(|m| (cell, m)))
        .collect()
}

/// Sets `below_median_count` of every summary: the number of its boxes with
/// an objective strictly below the pooled cross-evolver median of its
/// (feature set, direction) cell. Returns those medians.
pub fn annotate_below_median(summaries: &mut [RunSummary]) -> IndexMap<(String, String), f64> {
    let medians = pooled_medians(summaries);
    for s in summaries.iter_mut() {
        let m = medians[&s.meta.cell()];
        s.below_median_count = s.objectives.iter().filter(|&&f| f < m).count() as u64;
    }
    medians
}

/// One (feature set, direction, evolver) line of the campaign table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub feature_set: String,
    pub direction: String,
    pub evolver: String,
    pub runs: usize,
    /// Boxes covered: mean, sample std, min and max over runs.
    pub mean: f64,
    pub std: f64,
    pub min: u64,
    pub max: u64,
    /// Mean over runs of `below_median_count`.
    pub below_median: f64,
    /// Largest per-box update and hit counts over all runs.
    pub max_updates: u64,
    pub max_hits: u64,
    /// Best and median objective over the union of all runs' boxes.
    pub best: f64,
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CampaignTable {
    pub rows: Vec<TableRow>,
}

/// Aggregates summaries per (feature set, direction, evolver). Rows are
/// sorted by those three fields.
pub fn campaign_table(summaries: &[RunSummary]) -> CampaignTable {
    let mut cells: IndexMap<(String, String, String), Vec<&RunSummary>> = IndexMap::new();
    for s in summaries {
        let (fs, dir) = s.meta.cell();
        cells.entry((fs, dir, s.meta.evolver.clone())).or_default().push(s);
    }
    let mut rows: Vec<TableRow> = Vec::with_capacity(cells.len());
    for ((feature_set, direction, evolver), runs) in cells {
        if runs.is_empty() {
            log::warn!("no runs for {feature_set}/{direction}/{evolver}; cell omitted");
            continue;
        }
        let covered: Vec<f64> = runs.iter().map(|r| r.boxes_covered as f64).collect();
        let (mean, std) = mean_std(&covered);
        let below: Vec<f64> = runs.iter().map(|r| r.below_median_count as f64).collect();
        let pooled: Vec<f64> = runs.iter().flat_map(|r| r.objectives.iter().copied()).collect();
        rows.push(TableRow {
            runs: runs.len(),
            mean,
            std,
            min: runs.iter().map(|r| r.boxes_covered).min().unwrap_or(0),
            max: runs.iter().map(|r| r.boxes_covered).max().unwrap_or(0),
            below_median: mean_std(&below).0,
            max_updates: runs.iter().map(|r| r.max_updates).max().unwrap_or(0),
            max_hits: runs.iter().map(|r| r.max_hits).max().unwrap_or(0),
            best: pooled.iter().copied().fold(f64::INFINITY, f64::min),
            median: median(&pooled).unwrap_or(f64::NAN),
            feature_set,
            direction,
            evolver,
        });
    }
    rows.sort_by(|a, b| {
        (&a.feature_set, &a.direction, &a.evolver).cmp(&(&b.feature_set, &b.direction, &b.evolver))
    });
    CampaignTable { rows }
}

impl CampaignTable {
    pub fn row(&self, feature_set: &str, direction: &str, evolver: &str) -> Option<&TableRow> {
        self.rows
            .iter()
            .find(|r| r.feature_set == feature_set && r.direction == direction && r.evolver == evolver)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for r in &self.rows {
            wr.serialize(r)?;
        }
        wr.flush().map_err(|e| Error::io("<table csv>", e))?;
        Ok(())
    }

    /// Right-aligned plain-text rendering.
    pub fn to_text(&self) -> String {
        let header = [
            "fs", "direction", "evolver", "runs", "mean", "std", "<med", "upd.", "hits", "best",
            "median",
        ];
        let mut lines: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
        for r in &self.rows {
            lines.push(vec![
                r.feature_set.clone(),
                r.direction.clone(),
                r.evolver.clone(),
                r.runs.to_string(),
                format!("{:.2}", r.mean),
                format!("{:.2}", r.std),
                format!("{:.2}", r.below_median),
                r.max_updates.to_string(),
                r.max_hits.to_string(),
                format!("{:.4}", r.best),
                format!("{:.4}", r.median),
            ]);
        }
        let widths: Vec<usize> = (0..header.len())
            .map(|c| lines.iter().map(|l| l[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for line in &lines {
            let cells: Vec<String> = line
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(c, (cell, &w))| {
                    if c < 3 {
                        format!("{cell:<w$}")
                    } else {
                        format!("{cell:>w$}")
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join("  ").trim_end());
        }
        out
    }
}

/// Two-sided coverage comparison of two evolvers within one cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairTest {
    pub feature_set: String,
    pub direction: String,
    pub first: String,
    pub second: String,
    pub u: f64,
    pub p_value: f64,
    pub p_adjusted: f64,
    /// Evolver with the larger coverage, empty when not significant.
    pub winner: String,
}

/// Rank tests of boxes covered between every pair of evolvers of each
/// (feature set, direction) cell, Bonferroni-corrected over the pairs of
/// that cell. Pairs with too few runs are skipped with a warning.
pub fn pairwise_rank_tests(summaries: &[RunSummary], alpha: f64) -> Vec<PairTest> {
    let table_order = campaign_table(summaries);
    let mut cells: IndexMap<(String, String), Vec<String>> = IndexMap::new();
    for r in &table_order.rows {
        cells
            .entry((r.feature_set.clone(), r.direction.clone()))
            .or_default()
            .push(r.evolver.clone());
    }
    let coverage = |fs: &str, dir: &str, ev: &str| -> Vec<f64> {
        summaries
            .iter()
            .filter(|s| s.meta.feature_set == fs && s.meta.direction == dir && s.meta.evolver == ev)
            .map(|s| s.boxes_covered as f64)
            .collect()
    };
    let mut out = Vec::new();
    for ((fs, dir), evolvers) in cells {
        let m = evolvers.len() * evolvers.len().saturating_sub(1) / 2;
        for i in 0..evolvers.len() {
            for j in i + 1..evolvers.len() {
                let a = coverage(&fs, &dir, &evolvers[i]);
                let b = coverage(&fs, &dir, &evolvers[j]);
                match rank_test(&a, &b, Alternative::TwoSided, m, alpha) {
                    Ok(t) => out.push(PairTest {
                        feature_set: fs.clone(),
                        direction: dir.clone(),
                        first: evolvers[i].clone(),
                        second: evolvers[j].clone(),
                        u: t.u,
                        p_value: t.p_value,
                        p_adjusted: t.p_adjusted,
                        winner: match t.winner {
                            Some(Winner::First) => evolvers[i].clone(),
                            Some(Winner::Second) => evolvers[j].clone(),
                            None => String::new(),
                        },
                    }),
                    Err(e) => log::warn!(
                        "{fs}/{dir}: skipping {} vs {}: {e}",
                        evolvers[i],
                        evolvers[j]
                    ),
                }
            }
        }
    }
    out
}
