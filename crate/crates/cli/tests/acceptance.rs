//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. The coverage campaign runs at budget 10^5 and takes a while.
//!
//! Set `QDGEN_ACCEPTANCE_DIR` to keep campaign outputs for inspection.

#[allow(dead_code)]
#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use qdgen_core::analytics::{rank_test, Alternative, MIN_RANK_SAMPLES};
use qdgen_core::campaign::{self, Analysis, CampaignSpec};
use qdgen_core::evolve::{run, EventKind, EvolverConfig, FeatureMap};
use qdgen_core::graphfeat::{knn_graph, mst, strong_component_stats, weak_component_count};
use qdgen_core::solvers::{insertion_tour, DistanceMatrix, InsertionRule};
use qdgen_core::{rue_instance, FeatureSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ORACLE_LIMIT: Duration = Duration::from_secs(60);
const BOUNDS_LIMIT: Duration = Duration::from_secs(120);
const SOLVER_LIMIT: Duration = Duration::from_secs(120);
const ELITISM_LIMIT: Duration = Duration::from_secs(300);

const COVERAGE_BUDGET: u64 = 100_000;
const COVERAGE_SEEDS: usize = 10;
const COVERAGE_FACTOR: f64 = 1.5;
const RANK_ALPHA: f64 = 0.05;
const EARLY_ITERATION: u64 = 5_000;
const MEDIAN_TOLERANCE: f64 = 0.02;
const SUITE_SEEDS: usize = 5;
const SUITE_FACTOR: f64 = 1.5;

const QD: &str = "QD [all]";
const QD_SIMPLE: &str = "QD [simple]";
const EA50: &str = "(50+1) EA [all]";
const EA1: &str = "(1+1) EA [all]";
const DIRECTION: &str = "FI-vs-NI";

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }

    fn fail(detail: impl Into<String>) -> Self {
        Self::new(false, detail)
    }
}

struct Report {
    failures: usize,
}

impl Report {
    fn check(&mut self, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let mut outcome = f();
        let elapsed = start.elapsed();
        if let Some(limit) = limit {
            if elapsed > limit {
                outcome.passed = false;
                outcome.detail += &format!("; exceeded {}s", limit.as_secs());
            }
        }
        self.record(name, outcome, elapsed);
    }

    fn record(&mut self, name: &str, outcome: Outcome, elapsed: Duration) {
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        if !outcome.passed {
            self.failures += 1;
        }
        println!("{tag} {name:<22} {} [{:.1}s]", outcome.detail, elapsed.as_secs_f64());
    }
}

fn oracle_equivalence() -> Outcome {
    let mut graphs = 0;
    for seed in 0..1000u64 {
        let n = 4 + (seed % 7) as usize;
        let pts = common::random_points(n, seed);
        for k in [1, 2, 3, 5] {
            if k >= n {
                continue;
            }
            let g = knn_graph(&pts, k).unwrap();
            let adj = common::knn(&pts, k);
            if weak_component_count(&g) != common::weak_count(&adj) {
                return Outcome::fail(format!("weak count differs: seed {seed}, k {k}"));
            }
            if strong_component_stats(&g) != common::strong_stats(&adj) {
                return Outcome::fail(format!("strong components differ: seed {seed}, k {k}"));
            }
            graphs += 1;
        }
    }
    for seed in 0..200u64 {
        let n = 2 + (seed % 6) as usize;
        let pts = common::random_points(n, seed);
        let tree = mst(&pts).unwrap();
        let (brute, _) = common::brute_mst(&pts);
        if common::edge_weight(&pts, &tree.edges()) != brute {
            return Outcome::fail(format!("MST weight differs: seed {seed}"));
        }
    }
    Outcome::new(true, format!("{graphs} graphs on 1000 instances, 200 MSTs exact"))
}

fn feature_bounds() -> Outcome {
    let fc1 = FeatureSet::fc1();
    let fc2 = FeatureSet::fc2();
    let mut rng = ChaCha8Rng::seed_from_u64(0xfeed);
    let mut violations = 0;
    for _ in 0..10_000 {
        let n = rng.random_range(20..=100usize);
        let inst = rue_instance(n, &mut rng).unwrap();
        let key = fc1.evaluate(&inst).unwrap();
        let weak = key.values()[1].to_f64();
        if !(1.0..=(n - 3) as f64).contains(&weak) {
            violations += 1;
        }
        for (fs, key) in [(&fc1, key), (&fc2, fc2.evaluate(&inst).unwrap())] {
            let coords = fs.normalize(&key, n).unwrap();
            if coords.iter().any(|c| !(0.0..=1.0).contains(c)) {
                violations += 1;
            }
        }
    }
    Outcome::new(violations == 0, format!("{violations} violations over 10^4 instances"))
}

fn solver_guardrails() -> Outcome {
    let mut violations = 0;
    let mut worst = 0.0f64;
    for seed in 0..200u64 {
        let n = 3 + (seed % 6) as usize;
        let pts = common::random_points(n, seed + 10_000);
        let opt = common::brute_tsp(&pts);
        let dm = DistanceMatrix::new(&pts);
        for start in 0..n {
            let fi = insertion_tour(&dm, start, InsertionRule::Farthest).length;
            let ni = insertion_tour(&dm, start, InsertionRule::Nearest).length;
            worst = worst.max(ni / opt);
            if fi < opt - 1e-12 || ni > 2.0 * opt + 1e-12 {
                violations += 1;
            }
        }
    }
    Outcome::new(violations == 0, format!("{violations} violations, worst NI/OPT {worst:.3}"))
}

fn elitism_and_replay(scratch: &Path) -> Outcome {
    let cfg = EvolverConfig::qd(10_000, 7).with_n(100);
    let out = match run(&cfg) {
        Ok(o) => o,
        Err(e) => return Outcome::fail(e.to_string()),
    };
    let mut stored: HashMap<String, f64> = HashMap::new();
    for e in &out.log.events {
        let key = e.key.to_string();
        match e.kind {
            EventKind::FirstHit => {
                stored.insert(key, e.objective);
            }
            EventKind::Update => {
                let prev = stored.insert(key.clone(), e.objective).unwrap_or(f64::NEG_INFINITY);
                if e.objective > prev {
                    return Outcome::fail(format!("box {key} worsened at iteration {}", e.iteration));
                }
            }
            EventKind::Hit => {}
        }
    }
    if !out.log.reproduces(&out.archive).unwrap_or(false) {
        return Outcome::fail("in-memory replay differs from the archive");
    }
    let dir = scratch.join("elitism");
    if let Err(e) = campaign::write_run(&dir, &cfg, &out).and_then(|_| campaign::read_run(&dir)) {
        return Outcome::fail(format!("replay from disk: {e}"));
    }
    Outcome::new(
        true,
        format!(
            "{} boxes, {} updates, replay exact in memory and from disk",
            out.archive.len(),
            out.log.count(EventKind::Update)
        ),
    )
}

fn campaign_spec(evolvers: &str, feature_set: &str, seeds: usize, budget: u64, master: u64) -> CampaignSpec {
    let text = format!(
        r#"{{"evolvers": {evolvers}, "feature_sets": ["{feature_set}"], "seeds": {seeds},
            "master_seed": {master}, "n": 100, "budget": {budget}, "snapshot_every": 1000}}"#
    );
    CampaignSpec::from_json_str(&text).expect("valid campaign")
}

fn run_and_analyze(name: &str, spec: &CampaignSpec, root: &Path) -> Result<Analysis, String> {
    let out = root.join(name);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let report = campaign::run_campaign(spec, &out, workers).map_err(|e| e.to_string())?;
    if let Some((id, e)) = report.failed.first() {
        return Err(format!("run {id} failed: {e}"));
    }
    let analysis = campaign::analyze(&out).map_err(|e| e.to_string())?;
    analysis.write(&out.join("analysis")).map_err(|e| e.to_string())?;
    Ok(analysis)
}

fn coverages(a: &Analysis, feature_set: &str, evolver: &str) -> Vec<f64> {
    a.summaries
        .iter()
        .filter(|s| s.meta.feature_set == feature_set && s.meta.evolver == evolver)
        .map(|s| s.boxes_covered as f64)
        .collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn coverage_ordering(a: &Analysis) -> Outcome {
    let qd = coverages(a, "FC1", QD);
    let ea50 = coverages(a, "FC1", EA50);
    let ea1 = coverages(a, "FC1", EA1);
    if [&qd, &ea50, &ea1].iter().any(|v| v.len() != COVERAGE_SEEDS) {
        return Outcome::fail("missing runs");
    }
    let (m_qd, m50, m1) = (mean(&qd), mean(&ea50), mean(&ea1));
    let ordered = m_qd > m50 && m50 > m1;
    let factor = m_qd / m50.max(m1);
    let mut p_max = 0.0f64;
    for ea in [&ea50, &ea1] {
        match rank_test(&qd, ea, Alternative::Greater, 2, RANK_ALPHA) {
            Ok(t) => p_max = p_max.max(t.p_adjusted),
            Err(e) => return Outcome::fail(e.to_string()),
        }
    }
    Outcome::new(
        ordered && factor >= COVERAGE_FACTOR && p_max < RANK_ALPHA,
        format!(
            "QD {m_qd:.1} > (50+1) {m50:.1} > (1+1) {m1:.1}: {ordered}; factor {factor:.2} (need {COVERAGE_FACTOR}); \
             one-sided adjusted p {p_max:.2e} (need < {RANK_ALPHA})"
        ),
    )
}

fn coverage_at(a: &Analysis, feature_set: &str, evolver: &str, iteration: u64) -> Vec<f64> {
    a.coverage
        .iter()
        .filter(|r| r.feature_set == feature_set && r.evolver == evolver && r.iteration == iteration)
        .map(|r| r.covered as f64)
        .collect()
}

fn early_dominance(main: &Analysis, early: &Analysis) -> Outcome {
    let qd = coverage_at(main, "FC1", QD, EARLY_ITERATION);
    if qd.len() != COVERAGE_SEEDS {
        return Outcome::fail("missing QD snapshots");
    }
    let m_qd = mean(&qd);
    let mut baselines: Vec<(String, f64)> = Vec::new();
    for analysis in [main, early] {
        let mut names: Vec<&str> = analysis.summaries.iter().map(|s| s.meta.evolver.as_str()).collect();
        names.sort();
        names.dedup();
        for name in names.into_iter().filter(|n| *n != QD) {
            let v = coverage_at(analysis, "FC1", name, EARLY_ITERATION);
            if v.len() != COVERAGE_SEEDS {
                return Outcome::fail(format!("missing snapshots for {name}"));
            }
            baselines.push((name.to_string(), mean(&v)));
        }
    }
    let best = baselines.iter().cloned().fold((String::new(), f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
    Outcome::new(
        baselines.iter().all(|(_, m)| m_qd > *m),
        format!(
            "QD {m_qd:.1} vs best of {} baselines {} {:.1} at {EARLY_ITERATION} evaluations",
            baselines.len(),
            best.0,
            best.1
        ),
    )
}

fn objective_quality(a: &Analysis) -> Outcome {
    let (Some(qd), Some(ea)) = (a.table.row("FC1", DIRECTION, QD), a.table.row("FC1", DIRECTION, EA50)) else {
        return Outcome::fail("missing table rows");
    };
    Outcome::new(
        qd.median < 1.0 && qd.median <= ea.median + MEDIAN_TOLERANCE,
        format!(
            "pooled median QD {:.4} vs (50+1) EA {:.4} (tolerance {MEDIAN_TOLERANCE})",
            qd.median, ea.median
        ),
    )
}

fn suite_effect(a: &Analysis) -> Outcome {
    let all = coverages(a, "FC2", QD);
    let simple = coverages(a, "FC2", QD_SIMPLE);
    if all.len() != SUITE_SEEDS || simple.len() != SUITE_SEEDS {
        return Outcome::fail("missing runs");
    }
    let ratio = mean(&all) / mean(&simple);
    Outcome::new(
        ratio >= SUITE_FACTOR,
        format!(
            "FC2 QD[all] {:.1} vs QD[simple] {:.1}: ratio {ratio:.2} (need {SUITE_FACTOR})",
            mean(&all),
            mean(&simple)
        ),
    )
}

fn files_named(dir: &Path, names: &[&str]) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if names.iter().any(|n| p.file_name().unwrap() == *n) {
                out.push(p.strip_prefix(dir).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

fn determinism(scratch: &Path) -> Outcome {
    let spec = r#"{
        "evolvers": [
            {"evolver": "qd", "suite": "all"},
            {"evolver": "qd", "suite": "simple"},
            {"evolver": "ea", "mu": 1},
            {"evolver": "ea_archive", "mu": 5},
            {"evolver": "edo_igd", "mu": 5},
            {"evolver": "edo_hv", "mu": 5}
        ],
        "feature_sets": ["FC1", "FC2"],
        "directions": [{"numerator": "FI", "denominator": "NI"}, {"numerator": "NI", "denominator": "FI"}],
        "seeds": 2, "master_seed": 99, "n": 40, "budget": 400, "snapshot_every": 100,
        "edo": {"alpha": 0.1, "warmup": 200}
    }"#;
    let config = scratch.join("determinism.json");
    fs::write(&config, spec).unwrap();
    let mut dirs = Vec::new();
    for workers in ["1", "2", "1"] {
        let out = scratch.join(format!("determinism-{}", dirs.len()));
        let status = Command::new(env!("CARGO_BIN_EXE_qdgen"))
            .args(["campaign", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .args(["--workers", workers])
            .env("QDGEN_LOG", "error")
            .output()
            .expect("binary runs");
        if !status.status.success() {
            return Outcome::fail(String::from_utf8_lossy(&status.stderr).into_owned());
        }
        dirs.push(out);
    }
    let names = ["index.csv", "runlog.csv"];
    let reference = files_named(&dirs[0], &names);
    for other in &dirs[1..] {
        if files_named(other, &names) != reference {
            return Outcome::fail("different run layout");
        }
        for f in &reference {
            if fs::read(dirs[0].join(f)).unwrap() != fs::read(other.join(f)).unwrap() {
                return Outcome::fail(format!("{} differs", f.display()));
            }
        }
    }
    Outcome::new(
        true,
        format!("{} files byte-identical across 3 invocations (workers 1, 2, 1)", reference.len()),
    )
}

fn main() -> ExitCode {
    let _tmp;
    let scratch = match std::env::var_os("QDGEN_ACCEPTANCE_DIR") {
        Some(dir) => PathBuf::from(dir),
        None => {
            _tmp = tempfile::tempdir().unwrap();
            _tmp.path().to_path_buf()
        }
    };
    fs::create_dir_all(&scratch).unwrap();
    assert!(MIN_RANK_SAMPLES <= SUITE_SEEDS);

    let mut report = Report { failures: 0 };
    report.check("oracle-equivalence", Some(ORACLE_LIMIT), oracle_equivalence);
    report.check("feature-bounds", Some(BOUNDS_LIMIT), feature_bounds);
    report.check("solver-guardrails", Some(SOLVER_LIMIT), solver_guardrails);
    report.check("elitism-and-replay", Some(ELITISM_LIMIT), || elitism_and_replay(&scratch));
    report.check("determinism", None, || determinism(&scratch));

    let start = Instant::now();
    let main_spec = campaign_spec(
        r#"[{"evolver": "qd"}, {"evolver": "ea_archive", "mu": 50}, {"evolver": "ea_archive", "mu": 1}]"#,
        "FC1",
        COVERAGE_SEEDS,
        COVERAGE_BUDGET,
        1,
    );
    let early_spec = campaign_spec(
        r#"[{"evolver": "ea", "mu": 1}, {"evolver": "ea", "mu": 50},
            {"evolver": "edo_igd", "mu": 50}, {"evolver": "edo_hv", "mu": 50}]"#,
        "FC1",
        COVERAGE_SEEDS,
        EARLY_ITERATION,
        2,
    );
    let main = run_and_analyze("coverage", &main_spec, &scratch);
    let early = run_and_analyze("early", &early_spec, &scratch);
    let campaign_time = start.elapsed();
    match &main {
        Ok(a) => {
            report.record("coverage-ordering", coverage_ordering(a), campaign_time);
            report.record("objective-quality", objective_quality(a), Duration::ZERO);
        }
        Err(e) => {
            report.record("coverage-ordering", Outcome::fail(e.clone()), campaign_time);
            report.record("objective-quality", Outcome::fail(e.clone()), Duration::ZERO);
        }
    }
    let outcome = match (&main, &early) {
        (Ok(m), Ok(e)) => early_dominance(m, e),
        (Err(e), _) | (_, Err(e)) => Outcome::fail(e.clone()),
    };
    report.record("early-dominance", outcome, Duration::ZERO);

    report.check("mutation-suite-effect", None, || {
        let spec = campaign_spec(
            r#"[{"evolver": "qd", "suite": "all"}, {"evolver": "qd", "suite": "simple"}]"#,
            "FC2",
            SUITE_SEEDS,
            COVERAGE_BUDGET,
            3,
        );
        match run_and_analyze("suites", &spec, &scratch) {
            Ok(a) => suite_effect(&a),
            Err(e) => Outcome::fail(e),
        }
    });

    println!("{} criteria failed", report.failures);
    if report.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
