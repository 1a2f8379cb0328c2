//! End-to-end checks of the binary: exit codes, output formats, seed
//! determinism, config precedence, and the pinned posterior fixture.

use std::path::Path;
use std::process::{Command, Output};

fn bnpmix() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bnpmix"));
    cmd.env_remove("BNP_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bnpmix().args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn exit_codes_follow_the_failure_class() {
    assert_eq!(run(&["exact", "--bogus-flag"]).status.code(), Some(1), "usage");
    assert_eq!(
        run(&["exact", "--input", "/definitely/not/here.txt"]).status.code(),
        Some(1),
        "missing input"
    );
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    assert_eq!(
        run(&["gibbs", "--alpha=-1", "--n", "4", "--out-dir", out_dir]).status.code(),
        Some(2),
        "domain"
    );
    assert_eq!(
        run(&["exact", "--n", "20", "--out-dir", out_dir]).status.code(),
        Some(3),
        "capacity"
    );
    let ok = run(&["verify", "--cases", "20", "--identity-datasets", "0"]);
    assert_eq!(ok.status.code(), Some(0), "verify: {}", stderr(&ok));
    let broken = run(&[
        "verify",
        "--cases",
        "20",
        "--identity-datasets",
        "0",
        "--inject-marginal-bias=-2",
    ]);
    assert_eq!(broken.status.code(), Some(4), "injected fault");
    assert!(stderr(&broken).contains("under log floor"), "counterexample surfaced");
    let env_junk = bnpmix()
        .env("BNP_THREADS", "many")
        .args(["verify", "--cases", "1", "--identity-datasets", "0"])
        .output()
        .unwrap();
    assert_eq!(env_junk.status.code(), Some(1), "BNP_THREADS junk");
    assert_eq!(
        run(&["generate", "--preset", "no-such-preset"]).status.code(),
        Some(1),
        "unknown preset"
    );
}

#[test]
fn help_and_version_exit_cleanly() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn generation_is_deterministic_per_seed() {
    let a = run(&["generate", "--preset", "two-cluster-uniform", "--seed", "7"]);
    let b = run(&["generate", "--preset", "two-cluster-uniform", "--seed", "7"]);
    let c = run(&["generate", "--preset", "two-cluster-uniform", "--seed", "8"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout, "same seed must be byte-identical");
    assert_ne!(a.stdout, c.stdout, "different seed must differ");

    let text = stdout(&a);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with('#'), "header {header:?}");
    assert!(header.contains("kind=uniform-union"));
    assert!(header.contains("n=300"));
    assert!(header.contains("seed=7"));
    assert_eq!(lines.clone().count(), 300);
    for line in lines {
        line.parse::<f64>().unwrap();
    }
}

#[test]
fn exact_posterior_matches_the_pinned_fixture() {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "exact",
        "--input",
        fixtures.join("exact_n8_input.txt").to_str().unwrap(),
        "--alpha",
        "1",
        "--prior",
        "gaussian",
        "--sigma2",
        "1",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let got = std::fs::read(dir.path().join("posterior.csv")).unwrap();
    let want = std::fs::read(fixtures.join("exact_n8_posterior.csv")).unwrap();
    assert_eq!(got, want, "posterior CSV drifted from the pinned fixture");
}

#[test]
fn exact_on_a_single_point_emits_one_complete_row() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("one.txt");
    std::fs::write(&input, "0.25\n").unwrap();
    let out = run(&[
        "exact",
        "--input",
        input.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let csv = std::fs::read_to_string(dir.path().join("posterior.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "s,log_weight,prob,ratio,ratio_x_s,ratio_x_s2,bound_shape,quotient"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(lines.next(), None);
    assert_eq!(row[0], "1");
    assert_eq!(row[2], "1");
    assert_eq!(row[3], "", "no ratio for a single observation");
    assert_eq!(row[7], "", "no quotient without a ratio");

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["command"], "exact");
    assert_eq!(summary["mode_k"], 1);
    assert_eq!(summary["n"], 1);
}

#[test]
fn emitted_quotients_are_positive() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "exact",
        "--n",
        "7",
        "--seed",
        "5",
        "--discount",
        "0.4",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("posterior.csv")).unwrap();
    let mut seen = 0;
    for line in csv.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert!(cells[6].parse::<f64>().unwrap() > 0.0, "bound shape in {line}");
        if !cells[7].is_empty() {
            assert!(cells[7].parse::<f64>().unwrap() > 0.0, "quotient in {line}");
            seen += 1;
        }
    }
    assert!(seen >= 6, "only {seen} quotient cells");
}

#[test]
fn gibbs_on_one_point_fills_the_whole_histogram_with_ones() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("one.txt");
    std::fs::write(&input, "0.0\n").unwrap();
    let args = [
        "gibbs",
        "--input",
        input.to_str().unwrap(),
        "--burn-in",
        "10",
        "--samples",
        "100",
        "--thin",
        "1",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ];
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let csv = std::fs::read_to_string(dir.path().join("histogram.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "s,count,prob,ratio,ratio_x_s,ratio_x_s2,stable_flag");
    assert_eq!(lines.next().unwrap(), "1,100,1,0,0,0,1");
    assert_eq!(lines.next(), None);

    let trace = std::fs::read_to_string(dir.path().join("trace.txt")).unwrap();
    let mut trace_lines = trace.lines();
    assert!(trace_lines.next().unwrap().starts_with("# bnpmix gibbs"));
    let ks: Vec<&str> = trace_lines.collect();
    assert_eq!(ks.len(), 100);
    assert!(ks.iter().all(|k| *k == "1"));

    let first = std::fs::read(dir.path().join("histogram.csv")).unwrap();
    let rerun = run(&args);
    assert_eq!(rerun.status.code(), Some(0));
    let second = std::fs::read(dir.path().join("histogram.csv")).unwrap();
    assert_eq!(first, second, "same config and seed must reproduce the CSV");
}

#[test]
fn config_file_layers_between_preset_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.conf");
    std::fs::write(
        &config,
        "# experiment overrides\nmodel.alpha = 2\ngenerator.n = 5\nseed = 9\n",
    )
    .unwrap();

    let out_dir = dir.path().to_str().unwrap();
    let from_file = run(&[
        "exact",
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        out_dir,
    ]);
    assert_eq!(from_file.status.code(), Some(0), "{}", stderr(&from_file));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["config"]["model"]["alpha"], 2.0);
    assert_eq!(summary["config"]["data"]["n"], 5);
    assert_eq!(summary["config"]["seed"], 9);

    let flag_wins = run(&[
        "exact",
        "--config",
        config.to_str().unwrap(),
        "--alpha",
        "3",
        "--out-dir",
        out_dir,
    ]);
    assert_eq!(flag_wins.status.code(), Some(0), "{}", stderr(&flag_wins));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["config"]["model"]["alpha"], 3.0);

    let junk = dir.path().join("junk.conf");
    std::fs::write(&junk, "model.alpha = 2\nwhat.is.this = 1\n").unwrap();
    let bad = run(&["exact", "--config", junk.to_str().unwrap(), "--out-dir", out_dir]);
    assert_eq!(bad.status.code(), Some(1), "unknown key is a usage error");
    assert!(stderr(&bad).contains("what.is.this"));
}

#[test]
fn verify_report_is_machine_readable() {
    let out = run(&[
        "verify",
        "--cases",
        "40",
        "--identity-datasets",
        "1",
        "--max-n",
        "4",
        "--seed",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["passed"], true);
    let suites = report["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 3);
    for suite in suites {
        assert_eq!(suite["failures"], 0);
        assert!(suite["first_counterexample"].is_null());
    }
}

#[test]
fn preset_runs_end_to_end_with_reduced_budget() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "gibbs",
        "--preset",
        "one-cluster-gaussian",
        "--n",
        "40",
        "--burn-in",
        "200",
        "--samples",
        "100",
        "--thin",
        "2",
        "--seed",
        "12",
        "--chains",
        "2",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["retained"], 200, "two chains of 100 draws");
    assert_eq!(summary["rng"]["streams"], 2);
    assert_eq!(summary["rng"]["algorithm"], "chacha8");
    assert_eq!(summary["config"]["model"]["prior"]["kind"], "gaussian");
    let trace = std::fs::read_to_string(dir.path().join("trace.txt")).unwrap();
    assert_eq!(trace.lines().count(), 201, "header plus both chains");
}
