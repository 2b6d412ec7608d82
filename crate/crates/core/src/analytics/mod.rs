//! Post-hoc statistics over finished runs: coverage curves, per-box
//! records, run summaries, the aggregate campaign table and rank tests.

mod ranktest;
mod table;

use indexmap::IndexMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolve::{Archive, BoxStats, EventKind, FeatureMap, RunLog};
use crate::graphfeat::BoxKey;

pub use ranktest::{
    bonferroni, mann_whitney, rank_test, Alternative, RankTest, Winner, MIN_RANK_SAMPLES,
};
pub use table::{
    annotate_below_median, campaign_table, pairwise_rank_tests, pooled_medians, summarize_run,
    CampaignTable, PairTest, RunMeta, RunSummary, TableRow,
};

/// Boxes covered over time as `(iteration, covered)` steps.
///
/// Evaluated at the snapshot iterations of the log, or at every first hit
/// when the log has no snapshots. The last value equals the number of
/// distinct boxes in the log.
pub fn coverage_curve(log: &RunLog) -> Vec<(u64, u64)> {
    let mut hits: Vec<u64> = log
        .events
        .iter()
        .filter(|e| e.kind == EventKind::FirstHit)
        .map(|e| e.iteration)
        .collect();
    hits.sort_unstable();
    let covered_at = |it: u64| hits.partition_point(|&h| h <= it) as u64;

    let mut grid: Vec<u64> = if log.snapshots.is_empty() {
        let mut g = hits.clone();
        g.extend(log.events.last().map(|e| e.iteration));
        g
    } else {
        log.snapshots.iter().map(|s| s.iteration).collect()
    };
    grid.sort_unstable();
    grid.dedup();
    grid.into_iter().map(|it| (it, covered_at(it))).collect()
}

/// Number of boxes covered after `iteration`.
pub fn coverage_at(log: &RunLog, iteration: u64) -> u64 {
    log.events
        .iter()
        .filter(|e| e.kind == EventKind::FirstHit && e.iteration <= iteration)
        .count() as u64
}

/// One covered box with its statistics and plotting coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxRecord {
    pub key: BoxKey,
    pub objective: f64,
    pub hits: u64,
    pub updates: u64,
    pub first_hit_iter: u64,
    pub last_update_iter: u64,
    /// Key scaled into the unit cube.
    pub coords: Vec<f64>,
}

/// Per-box records from box statistics, in the map's order.
pub fn box_records(
    stats: &IndexMap<BoxKey, BoxStats>,
    features: &dyn FeatureMap,
    n: usize,
) -> Result<Vec<BoxRecord>> {
    stats
        .iter()
        .map(|(key, s)| {
            Ok(BoxRecord {
                key: key.clone(),
                objective: s.objective,
                hits: s.hits,
                updates: s.updates,
                first_hit_iter: s.first_hit_iter,
                last_update_iter: s.last_update_iter,
                coords: features.normalize(key, n)?,
            })
        })
        .collect()
}

/// Per-box records of a finished run; `archive` and `log` must belong to
/// the same run.
pub fn box_heatmaps(
    archive: &Archive,
    log: &RunLog,
    features: &dyn FeatureMap,
    n: usize,
) -> Result<Vec<BoxRecord>> {
    if archive.run_id() != log.run_id {
        return Err(Error::RunMismatch {
            archive: archive.run_id().to_string(),
            log: log.run_id.clone(),
        });
    }
    box_records(&archive.stats(), features, n)
}

/// Median with the midpoint convention for even counts. `None` when empty.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    })
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
