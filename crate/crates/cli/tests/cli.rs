use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qdgen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdgen"))
        .args(args)
        .env("QDGEN_LOG", "error")
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn generate_is_deterministic_and_reloadable() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = qdgen(&["generate", "--n", "100", "--count", "3", "--seed", "7", "--out", s(dir.path())]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let mut files: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .filter(|f| f.to_string_lossy().ends_with(".json"))
        .collect();
    files.sort();
    assert_eq!(files.len(), 3);
    for f in &files {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap());
        let inst = qdgen_core::load_instance(a.path().join(f)).unwrap();
        assert_eq!(inst.n(), 100);
    }
    assert!(a.path().join("index.csv").is_file());
}

#[test]
fn generate_tsplib() {
    let dir = tempfile::tempdir().unwrap();
    let out = qdgen(&["generate", "--n", "12", "--count", "1", "--format", "tsp", "--out", s(dir.path())]);
    assert!(out.status.success(), "{}", stderr(&out));
    let inst = qdgen_core::load_instance(dir.path().join("instance_0000.tsp")).unwrap();
    assert_eq!(inst.n(), 12);
}

#[test]
fn zero_count_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = qdgen(&["generate", "--count", "0", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_arguments_are_usage_errors() {
    assert_eq!(qdgen(&["evolve"]).status.code(), Some(1));
    assert_eq!(qdgen(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(qdgen(&["--help"]).status.code(), Some(0));
}

#[test]
fn invalid_config_lists_offending_keys() {
    let dir = tempfile::tempdir().unwrap();
    let out = qdgen(&["evolve", "--config", s(&fixture("bad_config.json")), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("mutation_rate"), "{err}");
    assert!(err.contains("objective.reps"), "{err}");
}

#[test]
fn evolve_writes_a_complete_run() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = qdgen(&["evolve", "--config", s(&fixture("qd_small.json")), "--out", s(dir.path())]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    for f in ["config.json", "manifest.json", "index.csv", "runlog.csv", "coverage.csv", "population.csv"] {
        assert!(a.path().join(f).is_file(), "{f}");
    }
    // one row per evaluation: the initial instance plus the budget
    let log = fs::read_to_string(a.path().join("runlog.csv")).unwrap();
    assert_eq!(log.lines().count(), 1 + 1 + 300);
    for f in ["index.csv", "runlog.csv", "coverage.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let index = fs::read_to_string(a.path().join("index.csv")).unwrap();
    assert!(index.starts_with("key,objective,hits,updates,first_hit_iter,last_update_iter,file"));
    for line in index.lines().skip(1) {
        let file = line.rsplit(',').next().unwrap();
        assert!(a.path().join(file).is_file(), "{file}");
    }
}

#[test]
fn overrides_change_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = qdgen(&[
        "evolve",
        "--config",
        s(&fixture("qd_small.json")),
        "--out",
        s(dir.path()),
        "--budget",
        "20",
        "--snapshot-every",
        "5",
        "--seed",
        "3",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let log = fs::read_to_string(dir.path().join("runlog.csv")).unwrap();
    assert_eq!(log.lines().count(), 1 + 1 + 20);
    let coverage = fs::read_to_string(dir.path().join("coverage.csv")).unwrap();
    assert_eq!(coverage.lines().count(), 1 + 5);
    let manifest = fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    assert!(manifest.contains("\"seed\": 3"));
}

#[test]
fn single_run_analysis_has_zero_std() {
    let run = tempfile::tempdir().unwrap();
    let out = qdgen(&["evolve", "--config", s(&fixture("qd_small.json")), "--out", s(run.path())]);
    assert!(out.status.success());
    let analysis = tempfile::tempdir().unwrap();
    let out = qdgen(&["analyze", s(run.path()), "--out", s(analysis.path())]);
    assert!(out.status.success(), "{}", stderr(&out));
    let table = fs::read_to_string(analysis.path().join("table.csv")).unwrap();
    let row: Vec<&str> = table.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[3], "1");
    assert_eq!(row[5], "0.0");
}

fn run_mini_campaign(out: &Path, workers: &str) {
    let o = qdgen(&[
        "campaign",
        "--config",
        s(&fixture("mini_campaign.json")),
        "--out",
        s(out),
        "--workers",
        workers,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
}

const GOLDEN_FILES: &[&str] = &[
    "table.csv",
    "table.txt",
    "summaries.csv",
    "coverage.csv",
    "heatmap.csv",
    "objectives.csv",
    "rank_tests.csv",
];

#[test]
fn mini_campaign_matches_golden_outputs() {
    let campaign = tempfile::tempdir().unwrap();
    run_mini_campaign(campaign.path(), "2");
    let analysis = campaign.path().join("analysis");
    let out = qdgen(&["analyze", s(campaign.path()), "--out", s(&analysis)]);
    assert!(out.status.success(), "{}", stderr(&out));

    let golden = golden_dir();
    if std::env::var_os("QDGEN_BLESS").is_some() {
        fs::create_dir_all(&golden).unwrap();
        for f in GOLDEN_FILES {
            fs::copy(analysis.join(f), golden.join(f)).unwrap();
        }
    }
    for f in GOLDEN_FILES {
        let expected = fs::read(golden.join(f)).unwrap_or_else(|_| panic!("missing golden file {f}"));
        assert!(fs::read(analysis.join(f)).unwrap() == expected, "{f} differs from golden output");
    }
}

#[test]
fn corrupt_run_is_skipped_with_partial_exit() {
    let campaign = tempfile::tempdir().unwrap();
    run_mini_campaign(campaign.path(), "1");
    let runs = campaign.path().join("runs");
    let mut dirs: Vec<_> = fs::read_dir(&runs).unwrap().map(|e| e.unwrap().path()).collect();
    dirs.sort();
    fs::write(dirs[0].join("runlog.csv"), "iteration,kind,key,objective\n0,first_hit,oops,1.0\n").unwrap();

    let analysis = campaign.path().join("analysis");
    let out = qdgen(&["analyze", s(campaign.path()), "--out", s(&analysis)]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("skipped"));
    let summaries = fs::read_to_string(analysis.join("summaries.csv")).unwrap();
    assert_eq!(summaries.lines().count(), 1 + dirs.len() - 1);
}

#[test]
fn analyze_without_runs_fails() {
    let empty = tempfile::tempdir().unwrap();
    let out = qdgen(&["analyze", s(empty.path()), "--out", s(&empty.path().join("a"))]);
    assert_eq!(out.status.code(), Some(2));
}
