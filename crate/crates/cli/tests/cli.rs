//! End-to-end checks of the `qds3` binary: exit codes, record shape and
//! byte-identical reruns.

use std::process::{Command, Output};

use serde_json::Value;

fn qds3(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qds3")).args(args).env_remove("QDS3_THREADS").output().expect("binary runs")
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone())
        .expect("UTF-8 output")
        .lines()
        .map(|l| serde_json::from_str(l).unwrap_or_else(|e| panic!("not JSON ({e}): {l}")))
        .collect()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn no_subcommand_prints_usage_and_exits_2() {
    let out = qds3(&[]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&qds3(&["verify-category", "--bogus"])), 2);
    assert_eq!(code(&qds3(&["no-such-command"])), 2);
    // Seeds are mandatory for stochastic commands.
    assert_eq!(code(&qds3(&["move-stats", "--anyon", "C"])), 2);
    assert_eq!(code(&qds3(&["measure-ma", "--trials", "10"])), 2);
    assert_eq!(code(&qds3(&["move-stats", "--anyon", "Q", "--seed", "1"])), 2);
    assert_eq!(code(&qds3(&["concat-cc", "--inject", "1:4"])), 2);
    assert_eq!(code(&qds3(&["concat-cc", "--inject", "1:4:30"])), 2);
}

#[test]
fn resource_bounds_are_explained() {
    let out = qds3(&["ground-state", "--width", "9", "--height", "9"]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn help_exits_0() {
    let out = qds3(&["--help"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    for cmd in [
        "verify-category",
        "ground-state",
        "move-stats",
        "ribbon-demo",
        "circuit-equivalence",
        "measure-ma",
        "measure-mu",
        "merge-split",
        "syndrome-table",
        "qec-cycle",
        "concat-cc",
        "orthonormality",
    ] {
        assert!(text.contains(cmd), "{cmd} missing from help");
    }
}

#[test]
fn verify_category_reports_residuals() {
    let out = qds3(&["verify-category", "--seed", "1"]);
    assert_eq!(code(&out), 0);
    let recs = records(&out);
    assert_eq!(recs.len(), 10);
    for r in &recs {
        assert_eq!(r["command"], "verify-category");
        assert_eq!(r["seed"], 1);
        assert_eq!(r["pass"], true);
    }
    assert!(recs[0]["pentagon"].as_f64().unwrap() < 1e-9);
    assert!(recs[0]["hexagon"].as_f64().unwrap() < 1e-9);
    let dims: Vec<f64> = recs[2..].iter().map(|r| r["d"].as_f64().unwrap()).collect();
    assert_eq!(dims, [1.0, 1.0, 2.0, 3.0, 3.0, 2.0, 2.0, 2.0]);
}

#[test]
fn move_stats_gives_five_records_against_the_success_curve() {
    let args = ["move-stats", "--anyon", "C", "--rounds", "5", "--trials", "10000", "--seed", "7"];
    let out = qds3(&args);
    assert_eq!(code(&out), 0);
    let recs = records(&out);
    assert_eq!(recs.len(), 5);
    for (i, r) in recs.iter().enumerate() {
        let n = i as i32 + 1;
        assert_eq!(r["n"], n);
        assert_eq!(r["seed"], 7);
        assert_eq!(r["trials"], 10000);
        assert_eq!(r["analytic"].as_f64().unwrap(), 1.0 - 0.5f64.powi(n));
        assert!(r["z"].as_f64().unwrap() <= 3.0);
    }
    assert_eq!(qds3(&args).stdout, out.stdout, "rerun must be byte-identical");
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    for args in [
        &["measure-ma", "--trials", "400", "--seed", "11", "--transcripts"][..],
        &["merge-split", "--trials", "40", "--seed", "12"][..],
        &["qec-cycle", "--seed", "13", "--rounds", "10", "--trials", "3"][..],
        &["ribbon-demo", "--anyon", "F", "--trials", "150", "--seed", "14"][..],
    ] {
        let one: Vec<&str> = [&["--threads", "1"][..], args].concat();
        let two: Vec<&str> = [&["--threads", "2"][..], args].concat();
        let (a, b, c) = (qds3(&one), qds3(&two), qds3(&one));
        assert_eq!(code(&a), 0, "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{args:?} depends on the thread count");
        assert_eq!(a.stdout, c.stdout, "{args:?} is not reproducible");
    }
}

#[test]
fn every_stochastic_record_carries_its_seed() {
    let out = qds3(&["measure-mu", "--trials", "500", "--rounds", "2", "--seed", "21"]);
    assert_eq!(code(&out), 0);
    let recs = records(&out);
    assert_eq!(recs.len(), 2);
    let analytic: Vec<f64> = recs.iter().map(|r| r["analytic"].as_f64().unwrap()).collect();
    // Uniform amplitudes: P(U) = 1/3 + (2/3)(1/4)^2.
    assert!((analytic[0] - 0.375).abs() < 1e-12);
    assert!((analytic[1] - 0.625).abs() < 1e-12);
    for r in &recs {
        assert_eq!(r["seed"], 21);
        assert!(r["min_fidelity"].as_f64().unwrap() >= 1.0 - 1e-9);
    }
}

#[test]
fn statistical_outlier_exits_1() {
    // This seed puts the M_U outcome frequency 3.28 standard errors away
    // from the analytic value: an honest acceptance failure.
    let out = qds3(&["measure-mu", "--trials", "2000", "--rounds", "2", "--seed", "5"]);
    assert_eq!(code(&out), 1);
    let recs = records(&out);
    assert!(recs.iter().any(|r| r["pass"] == false));
    assert!(recs.iter().all(|r| r["min_fidelity"].as_f64().unwrap() >= 1.0 - 1e-9));
}

#[test]
fn output_file_matches_stdout_and_summary_is_a_digest() {
    let dir = std::env::temp_dir().join(format!("qds3-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("syndromes.jsonl");
    let plain = qds3(&["syndrome-table"]);
    let summary = qds3(&["syndrome-table", "--summary", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&summary), 0);
    assert_eq!(std::fs::read(&path).unwrap(), plain.stdout);
    let digest = String::from_utf8(summary.stdout).unwrap();
    assert!(digest.starts_with("syndrome-table (seed null): PASS"));
    assert!(digest.contains("X̂Ẑ → FGC"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn syndrome_table_rows() {
    let recs = records(&qds3(&["syndrome-table"]));
    let rows: Vec<(String, String, bool)> = recs
        .iter()
        .map(|r| (r["pauli"].as_str().unwrap().into(), r["letters"].as_str().unwrap().into(), r["deterministic"] == true))
        .collect();
    let want = [("X", "DDC", false), ("Z", "ABB", true), ("Y", "DEC", false), ("X̂", "FFA", true), ("Ẑ", "ACC", true), ("X̂Ẑ", "FGC", true)];
    assert_eq!(rows.len(), want.len());
    for (got, (p, l, d)) in rows.iter().zip(want) {
        assert_eq!((got.0.as_str(), got.1.as_str(), got.2), (p, l, d));
    }
}

#[test]
fn deterministic_verifications_pass() {
    for args in [&["circuit-equivalence"][..], &["orthonormality"][..], &["ground-state", "--width", "2", "--height", "1"][..]] {
        let out = qds3(args);
        assert_eq!(code(&out), 0, "{args:?}");
        let recs = records(&out);
        assert!(!recs.is_empty());
        assert!(recs.iter().all(|r| r["pass"] == true), "{args:?}");
    }
}

#[test]
fn concat_cc_corrects_a_single_error_but_not_two() {
    let out = qds3(&["concat-cc", "--inject", "1:4:10"]);
    assert_eq!(code(&out), 0);
    let recs = records(&out);
    let ft = recs.iter().find(|r| r["case"] == "fault-tolerance").expect("fault-tolerance record");
    assert_eq!(ft["corrected"], true);
    assert_eq!(ft["errors"][0], "1:4:10");

    let out = qds3(&["concat-cc", "--inject", "0:0:10", "--inject", "0:1:10"]);
    assert_eq!(code(&out), 0, "two errors exceed the distance; not an acceptance failure");
    let recs = records(&out);
    let ft = recs.iter().find(|r| r["case"] == "fault-tolerance").unwrap();
    assert_eq!(ft["corrected"], false);
    assert!(ft["analytic"].is_null());
}
