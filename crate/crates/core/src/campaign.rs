//! Campaigns: expansion of evolvers x feature sets x directions x seeds into
//! run configs, parallel execution, the on-disk run layout and the analysis
//! of a finished campaign directory.
//!
//! Layout of one run directory:
//!
//! ```text
//! config.json      the EvolverConfig
//! manifest.json    run id, config hash, seed, version, timestamp, counts
//! index.csv        key,objective,hits,updates,first_hit_iter,last_update_iter,file
//! archive/         one instance JSON per box
//! runlog.csv       iteration,kind,key,objective (one row per evaluation)
//! coverage.csv     iteration,covered
//! population.csv   final population of the EA-style evolvers
//! ```

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use indexmap::IndexMap;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{
    annotate_below_median, box_records, campaign_table, coverage_curve, pairwise_rank_tests,
    summarize_run, CampaignTable, PairTest, RunMeta, RunSummary,
};
use crate::error::{Error, Result};
use crate::evolve::{
    self, BoxStats, EdoParams, EvolverConfig, EvolverKind, FeatureSetConfig, RunLog, RunOutput,
    SuiteConfig, SCHEMA_VERSION,
};
use crate::graphfeat::BoxKey;
use crate::instance::{rue_instance, save_instance, Provenance};
use crate::solvers::ObjectiveSpec;

/// Significance level for the pairwise rank tests written by [`analyze`].
pub const RANK_TEST_ALPHA: f64 = 0.05;

/// Seed of the `counter`-th run, derived from the campaign's master seed.
/// Each counter selects its own ChaCha stream, so runs never share random
/// numbers and the mapping does not depend on scheduling.
pub fn derive_seed(master: u64, counter: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(counter);
    rng.next_u64()
}

/// One evolver column of a campaign, e.g. `(50+1) EA [all]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolverEntry {
    pub evolver: EvolverKind,
    #[serde(default = "one")]
    pub mu: usize,
    #[serde(default = "all_suite")]
    pub suite: SuiteConfig,
}

fn one() -> usize {
    1
}

fn all_suite() -> SuiteConfig {
    SuiteConfig::Named("all".into())
}

fn fc1() -> Vec<FeatureSetConfig> {
    vec![FeatureSetConfig::Named("FC1".into())]
}

fn fi_vs_ni() -> Vec<ObjectiveSpec> {
    vec![ObjectiveSpec::fi_vs_ni()]
}

fn default_n() -> usize {
    100
}

fn default_snapshot_every() -> u64 {
    1000
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

impl EvolverEntry {
    pub fn new(evolver: EvolverKind, mu: usize, suite: &str) -> Self {
        Self {
            evolver,
            mu,
            suite: SuiteConfig::Named(suite.into()),
        }
    }
}

/// Campaign file contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSpec {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub evolvers: Vec<EvolverEntry>,
    #[serde(default = "fc1")]
    pub feature_sets: Vec<FeatureSetConfig>,
    #[serde(default = "fi_vs_ni")]
    pub directions: Vec<ObjectiveSpec>,
    /// Independent runs per (feature set, direction, evolver) cell.
    pub seeds: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_n")]
    pub n: usize,
    pub budget: u64,
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: u64,
    #[serde(default)]
    pub edo: EdoParams,
    #[serde(default = "one")]
    pub workers: usize,
}

impl CampaignSpec {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if spec.schema != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema {} (expected {SCHEMA_VERSION})",
                spec.schema
            )));
        }
        Ok(spec)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec is always serializable")
    }

    /// All run configs, ordered by feature set, direction, evolver, then
    /// replicate. Run `i` of the list gets `derive_seed(master_seed, i)`.
    pub fn expand(&self) -> Result<Vec<EvolverConfig>> {
        if self.seeds == 0 || self.evolvers.is_empty() {
            return Err(Error::Config("campaign needs >= 1 evolver and >= 1 seed".into()));
        }
        let mut configs = Vec::new();
        let mut counter = 0u64;
        for fs in &self.feature_sets {
            for dir in &self.directions {
                for ev in &self.evolvers {
                    for _ in 0..self.seeds {
                        let config = EvolverConfig {
                            schema: SCHEMA_VERSION,
                            evolver: ev.evolver,
                            n: self.n,
                            budget: self.budget,
                            mu: ev.mu,
                            suite: ev.suite.clone(),
                            feature_set: fs.clone(),
                            objective: dir.clone(),
                            seed: derive_seed(self.master_seed, counter),
                            snapshot_every: self.snapshot_every,
                            edo: self.edo.clone(),
                        };
                        config.validate()?;
                        configs.push(config);
                        counter += 1;
                    }
                }
            }
        }
        let mut ids: Vec<String> = configs.iter().map(EvolverConfig::run_id).collect();
        ids.sort();
        ids.dedup();
        if ids.len() != configs.len() {
            return Err(Error::Config("campaign expands to duplicate runs".into()));
        }
        Ok(configs)
    }
}

#[derive(Serialize)]
struct GeneratedRow {
    file: String,
    n: usize,
    seed: u64,
    index: usize,
}

/// Writes `count` RUE instances of `n` cities to `out/instance_<i>.<ext>`
/// (`ext` = `json` or `tsp`) plus an `index.csv`. Instance `i` is drawn
/// from its own stream `derive_seed(seed, i)`.
pub fn generate_instances(n: usize, count: usize, seed: u64, ext: &str, out: &Path) -> Result<Vec<PathBuf>> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be >= 1".into()));
    }
    if ext != "json" && ext != "tsp" {
        return Err(Error::InvalidParameter(format!("unknown instance format {ext:?}")));
    }
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let width = count.to_string().len().max(4);
    let mut paths = Vec::with_capacity(count);
    let mut rows = Vec::with_capacity(count);
    for i in 0..count {
        let instance_seed = derive_seed(seed, i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(instance_seed);
        let inst = rue_instance(n, &mut rng)?.with_meta(Provenance {
            seed: Some(instance_seed),
            ..Default::default()
        });
        let file = format!("instance_{i:0width$}.{ext}");
        let path = out.join(&file);
        save_instance(&inst, &path)?;
        rows.push(GeneratedRow {
            file,
            n,
            seed: instance_seed,
            index: i,
        });
        paths.push(path);
    }
    write_rows(&out.join("index.csv"), &[], &rows)?;
    Ok(paths)
}

/// Per-run metadata file. The timestamp is the only non-deterministic
/// output of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub run_id: String,
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
    pub created_unix: u64,
    pub evaluations: u64,
    pub init_evaluations: u64,
    pub warmup_evaluations: u64,
    pub boxes_covered: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct IndexRow {
    key: BoxKey,
    objective: f64,
    hits: u64,
    updates: u64,
    first_hit_iter: u64,
    last_update_iter: u64,
    file: String,
}

#[derive(Serialize)]
struct PopulationRow {
    slot: usize,
    key: BoxKey,
    objective: f64,
    born: u64,
}

fn box_file_name(key: &BoxKey) -> String {
    format!("box_{}.json", key.to_string().replace(';', "_"))
}

fn create_file(path: &Path) -> Result<BufWriter<fs::File>> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_rows<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create_file(path)?);
    if rows.is_empty() {
        w.write_record(header)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes a finished run into `dir` (created if missing).
pub fn write_run(dir: &Path, config: &EvolverConfig, output: &RunOutput) -> Result<Manifest> {
    let archive_dir = dir.join("archive");
    fs::create_dir_all(&archive_dir).map_err(|e| Error::io(&archive_dir, e))?;
    write_text(&dir.join("config.json"), &config.to_json_pretty())?;

    let mut rows = Vec::with_capacity(output.archive.len());
    for (key, elite) in output.archive.iter() {
        let file = format!("archive/{}", box_file_name(key));
        write_text(&dir.join(&file), &elite.instance.to_json()?)?;
        rows.push(IndexRow {
            key: key.clone(),
            objective: elite.objective,
            hits: elite.hits,
            updates: elite.updates,
            first_hit_iter: elite.first_hit_iter,
            last_update_iter: elite.last_update_iter,
            file,
        });
    }
    write_rows(
        &dir.join("index.csv"),
        &["key", "objective", "hits", "updates", "first_hit_iter", "last_update_iter", "file"],
        &rows,
    )?;

    let path = dir.join("runlog.csv");
    output.log.write_events_csv(create_file(&path)?)?;
    let path = dir.join("coverage.csv");
    output.log.write_snapshots_csv(create_file(&path)?)?;

    let population: Vec<PopulationRow> = output
        .population
        .iter()
        .enumerate()
        .map(|(slot, ind)| PopulationRow {
            slot,
            key: ind.key.clone(),
            objective: ind.objective,
            born: ind.born,
        })
        .collect();
    write_rows(&dir.join("population.csv"), &["slot", "key", "objective", "born"], &population)?;

    let manifest = Manifest {
        run_id: config.run_id(),
        config_hash: config.hash(),
        seed: config.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        created_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        evaluations: output.evaluations,
        init_evaluations: output.init_evaluations,
        warmup_evaluations: output.warmup_evaluations,
        boxes_covered: output.archive.len(),
    };
    write_text(
        &dir.join("manifest.json"),
        &serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(manifest)
}

/// Runs `config` and writes the result into `dir`.
pub fn run_to_dir(config: &EvolverConfig, dir: &Path) -> Result<Manifest> {
    let output = evolve::run(config)?;
    write_run(dir, config, &output)
}

/// A run read back from disk.
#[derive(Debug, Clone)]
pub struct LoadedRun {
    pub dir: PathBuf,
    pub config: EvolverConfig,
    pub stats: IndexMap<BoxKey, BoxStats>,
    pub log: RunLog,
}

/// Reads a run directory and checks that `index.csv` agrees with the replay
/// of `runlog.csv`.
pub fn read_run(dir: &Path) -> Result<LoadedRun> {
    let config = EvolverConfig::from_json_str(&read_text(&dir.join("config.json"))?)?;
    let run_id = config.run_id();

    let path = dir.join("index.csv");
    let mut stats = IndexMap::new();
    let mut reader = csv::Reader::from_path(&path)?;
    for row in reader.deserialize() {
        let row: IndexRow = row?;
        stats.insert(
            row.key,
            BoxStats {
                objective: row.objective,
                hits: row.hits,
                updates: row.updates,
                first_hit_iter: row.first_hit_iter,
                last_update_iter: row.last_update_iter,
            },
        );
    }

    let events = dir.join("runlog.csv");
    let snapshots = dir.join("coverage.csv");
    let log = RunLog::read_csv(
        &run_id,
        fs::File::open(&events).map_err(|e| Error::io(&events, e))?,
        fs::File::open(&snapshots).map_err(|e| Error::io(&snapshots, e))?,
    )?;
    if log.replay()? != stats {
        return Err(Error::Inconsistent(format!(
            "{}: index.csv does not match the replay of runlog.csv",
            dir.display()
        )));
    }
    Ok(LoadedRun {
        dir: dir.to_path_buf(),
        config,
        stats,
        log,
    })
}

/// Outcome of [`run_campaign`]; runs are listed in expansion order.
#[derive(Debug)]
pub struct CampaignReport {
    pub completed: Vec<Manifest>,
    pub failed: Vec<(String, Error)>,
}

/// Executes every run of `spec` on `workers` threads and writes each into
/// `out/runs/<run id>`. Results do not depend on `workers`.
pub fn run_campaign(spec: &CampaignSpec, out: &Path, workers: usize) -> Result<CampaignReport> {
    let configs = spec.expand()?;
    let runs_dir = out.join("runs");
    fs::create_dir_all(&runs_dir).map_err(|e| Error::io(&runs_dir, e))?;
    write_text(&out.join("campaign.json"), &spec.to_json_pretty())?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
    let total = configs.len();
    let results: Vec<(String, Result<Manifest>)> = pool.install(|| {
        configs
            .par_iter()
            .enumerate()
            .map(|(i, config)| {
                let run_id = config.run_id();
                log::info!("run {}/{total}: {run_id}", i + 1);
                let result = run_to_dir(config, &runs_dir.join(&run_id));
                if let Err(e) = &result {
                    log::warn!("run {run_id} failed: {e}");
                }
                (run_id, result)
            })
            .collect()
    });

    let mut report = CampaignReport {
        completed: Vec::new(),
        failed: Vec::new(),
    };
    for (id, r) in results {
        match r {
            Ok(m) => report.completed.push(m),
            Err(e) => report.failed.push((id, e)),
        }
    }
    Ok(report)
}

/// Run directories below `dir`: `dir` itself if it is a run, otherwise its
/// subdirectories (or those of `dir/runs`) holding a `config.json`, sorted
/// by name.
pub fn discover_runs(dir: &Path) -> Result<Vec<PathBuf>> {
    if dir.join("config.json").is_file() {
        return Ok(vec![dir.to_path_buf()]);
    }
    let base = if dir.join("runs").is_dir() {
        dir.join("runs")
    } else {
        dir.to_path_buf()
    };
    let mut runs = Vec::new();
    for entry in fs::read_dir(&base).map_err(|e| Error::io(&base, e))? {
        let path = entry.map_err(|e| Error::io(&base, e))?.path();
        if path.is_dir() && path.join("config.json").is_file() {
            runs.push(path);
        }
    }
    runs.sort();
    Ok(runs)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub run_id: String,
    pub evolver: String,
    pub feature_set: String,
    pub direction: String,
    pub seed: u64,
    pub boxes_covered: u64,
    pub below_median_count: u64,
    pub max_updates: u64,
    pub max_hits: u64,
    pub best_objective: f64,
    pub median_objective: f64,
}

impl From<&RunSummary> for SummaryRow {
    fn from(s: &RunSummary) -> Self {
        Self {
            run_id: s.meta.run_id.clone(),
            evolver: s.meta.evolver.clone(),
            feature_set: s.meta.feature_set.clone(),
            direction: s.meta.direction.clone(),
            seed: s.meta.seed,
            boxes_covered: s.boxes_covered,
            below_median_count: s.below_median_count,
            max_updates: s.max_updates,
            max_hits: s.max_hits,
            best_objective: s.best_objective,
            median_objective: s.median_objective,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageRow {
    pub run_id: String,
    pub evolver: String,
    pub feature_set: String,
    pub direction: String,
    pub seed: u64,
    pub iteration: u64,
    pub covered: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatmapRow {
    pub run_id: String,
    pub evolver: String,
    pub feature_set: String,
    pub direction: String,
    pub seed: u64,
    pub key: BoxKey,
    /// First two normalized feature coordinates (`y` empty for one feature).
    pub x: f64,
    pub y: Option<f64>,
    pub objective: f64,
    pub hits: u64,
    pub updates: u64,
    pub first_hit_iter: u64,
    pub last_update_iter: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectiveRow {
    pub run_id: String,
    pub evolver: String,
    pub feature_set: String,
    pub direction: String,
    pub seed: u64,
    pub key: BoxKey,
    pub objective: f64,
}

/// Everything [`analyze`] derives from a campaign directory.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub summaries: Vec<RunSummary>,
    pub table: CampaignTable,
    pub coverage: Vec<CoverageRow>,
    pub heatmap: Vec<HeatmapRow>,
    pub objectives: Vec<ObjectiveRow>,
    pub rank_tests: Vec<PairTest>,
    /// Run directories that could not be read, with the reason.
    pub skipped: Vec<(PathBuf, String)>,
}

fn analyze_run(run: &LoadedRun) -> Result<(RunSummary, Vec<CoverageRow>, Vec<HeatmapRow>)> {
    let meta = RunMeta::from_config(&run.config);
    let features = run.config.feature_set.build()?;
    let records = box_records(&run.stats, &features, run.config.n)?;
    let coverage = coverage_curve(&run.log)
        .into_iter()
        .map(|(iteration, covered)| CoverageRow {
            run_id: meta.run_id.clone(),
            evolver: meta.evolver.clone(),
            feature_set: meta.feature_set.clone(),
            direction: meta.direction.clone(),
            seed: meta.seed,
            iteration,
            covered,
        })
        .collect();
    let heatmap = records
        .into_iter()
        .map(|r| HeatmapRow {
            run_id: meta.run_id.clone(),
            evolver: meta.evolver.clone(),
            feature_set: meta.feature_set.clone(),
            direction: meta.direction.clone(),
            seed: meta.seed,
            x: r.coords[0],
            y: r.coords.get(1).copied(),
            key: r.key,
            objective: r.objective,
            hits: r.hits,
            updates: r.updates,
            first_hit_iter: r.first_hit_iter,
            last_update_iter: r.last_update_iter,
        })
        .collect();
    Ok((summarize_run(meta, &run.stats)?, coverage, heatmap))
}

/// Reads every run below `dir` and computes summaries, the campaign table,
/// tidy plotting data and pairwise rank tests. Unreadable runs are skipped
/// with a warning; it is an error if none can be read.
pub fn analyze(dir: &Path) -> Result<Analysis> {
    let mut summaries = Vec::new();
    let mut coverage = Vec::new();
    let mut heatmap = Vec::new();
    let mut skipped = Vec::new();
    for run_dir in discover_runs(dir)? {
        match read_run(&run_dir).and_then(|run| analyze_run(&run)) {
            Ok((s, c, h)) => {
                summaries.push(s);
                coverage.extend(c);
                heatmap.extend(h);
            }
            Err(e) => {
                log::warn!("skipping {}: {e}", run_dir.display());
                skipped.push((run_dir, e.to_string()));
            }
        }
    }
    if summaries.is_empty() {
        return Err(Error::Inconsistent(format!(
            "no readable runs below {}",
            dir.display()
        )));
    }
    annotate_below_median(&mut summaries);
    let objectives = heatmap
        .iter()
        .map(|h| ObjectiveRow {
            run_id: h.run_id.clone(),
            evolver: h.evolver.clone(),
            feature_set: h.feature_set.clone(),
            direction: h.direction.clone(),
            seed: h.seed,
            key: h.key.clone(),
            objective: h.objective,
        })
        .collect();
    Ok(Analysis {
        table: campaign_table(&summaries),
        rank_tests: pairwise_rank_tests(&summaries, RANK_TEST_ALPHA),
        summaries,
        coverage,
        heatmap,
        objectives,
        skipped,
    })
}

impl Analysis {
    /// Writes `table.csv`, `table.txt`, `summaries.csv`, `coverage.csv`,
    /// `heatmap.csv`, `objectives.csv` and `rank_tests.csv` into `out`.
    pub fn write(&self, out: &Path) -> Result<()> {
        fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
        self.table.write_csv(create_file(&out.join("table.csv"))?)?;
        write_text(&out.join("table.txt"), &self.table.to_text())?;
        let summaries: Vec<SummaryRow> = self.summaries.iter().map(SummaryRow::from).collect();
        write_rows(&out.join("summaries.csv"), &[], &summaries)?;
        write_rows(&out.join("coverage.csv"), &[], &self.coverage)?;
        write_rows(&out.join("heatmap.csv"), &[], &self.heatmap)?;
        write_rows(&out.join("objectives.csv"), &[], &self.objectives)?;
        write_rows(
            &out.join("rank_tests.csv"),
            &["feature_set", "direction", "first", "second", "u", "p_value", "p_adjusted", "winner"],
            &self.rank_tests,
        )?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> CampaignSpec {
        CampaignSpec::from_json_str(
            r#"{"evolvers": [{"evolver": "qd"}, {"evolver": "ea_archive", "mu": 3, "suite": "simple"}],
                "seeds": 2, "n": 20, "budget": 40, "snapshot_every": 10, "master_seed": 9}"#,
        )
        .unwrap()
    }

    #[test]
    fn expansion_order_and_seeds() {
        let configs = spec().expand().unwrap();
        assert_eq!(configs.len(), 4);
        assert_eq!(configs[0].evolver, EvolverKind::Qd);
        assert_eq!(configs[2].mu, 3);
        let seeds: Vec<u64> = configs.iter().map(|c| c.seed).collect();
        assert_eq!(seeds[3], derive_seed(9, 3));
        let mut distinct = seeds.clone();
        distinct.sort_unstable();
        distinct.dedup();
        assert_eq!(distinct.len(), 4);
    }

    #[test]
    fn generated_instances_reload() {
        let tmp = tempfile::tempdir().unwrap();
        let paths = generate_instances(30, 3, 7, "json", tmp.path()).unwrap();
        assert_eq!(paths.len(), 3);
        let again = tempfile::tempdir().unwrap();
        generate_instances(30, 3, 7, "json", again.path()).unwrap();
        for p in &paths {
            let inst = crate::instance::load_instance(p).unwrap();
            assert_eq!(inst.n(), 30);
            let name = p.file_name().unwrap();
            assert_eq!(fs::read(p).unwrap(), fs::read(again.path().join(name)).unwrap());
        }
        assert!(generate_instances(30, 0, 7, "json", tmp.path()).is_err());
    }

    #[test]
    fn derived_seeds_are_stable() {
        assert_eq!(derive_seed(1, 5), derive_seed(1, 5));
        assert_ne!(derive_seed(1, 5), derive_seed(1, 6));
        assert_ne!(derive_seed(1, 5), derive_seed(2, 5));
    }

    #[test]
    fn unknown_campaign_keys_are_rejected() {
        assert!(CampaignSpec::from_json_str(r#"{"evolvers": [], "seeds": 1, "budget": 1, "bogus": 2}"#).is_err());
        assert!(spec().expand().is_ok());
        let mut empty = spec();
        empty.seeds = 0;
        assert!(empty.expand().is_err());
    }

    #[test]
    fn run_round_trips_through_disk() {
        let tmp = tempfile::tempdir().unwrap();
        let config = EvolverConfig::qd(60, 2).with_n(20);
        let output = evolve::run(&config).unwrap();
        let manifest = write_run(tmp.path(), &config, &output).unwrap();
        assert_eq!(manifest.boxes_covered, output.archive.len());
        let loaded = read_run(tmp.path()).unwrap();
        assert_eq!(loaded.stats, output.archive.stats());
        assert_eq!(loaded.log.events, output.log.events);
        for (key, _) in output.archive.iter() {
            assert!(tmp.path().join("archive").join(box_file_name(key)).is_file());
        }
    }

    #[test]
    fn campaign_and_analysis() {
        let tmp = tempfile::tempdir().unwrap();
        let report = run_campaign(&spec(), tmp.path(), 2).unwrap();
        assert_eq!(report.completed.len(), 4);
        assert!(report.failed.is_empty());
        let analysis = analyze(tmp.path()).unwrap();
        assert_eq!(analysis.summaries.len(), 4);
        assert_eq!(analysis.table.rows.len(), 2);
        assert!(analysis.skipped.is_empty());
        let out = tmp.path().join("analysis");
        analysis.write(&out).unwrap();
        for f in ["table.csv", "table.txt", "summaries.csv", "coverage.csv", "heatmap.csv", "objectives.csv", "rank_tests.csv"] {
            assert!(out.join(f).is_file(), "{f}");
        }
    }
}
