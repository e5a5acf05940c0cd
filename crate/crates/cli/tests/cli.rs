use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tsad-eval"));
    cmd.env_remove("TSAD_EVAL_SEED");
    cmd
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write_column(dir: &Path, name: &str, header: &str, values: &[f64]) -> PathBuf {
    let mut text = format!("{header}\n");
    for v in values {
        text.push_str(&format!("{v}\n"));
    }
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn toy(dir: &Path) {
    write_column(dir, "l.csv", "label", &[0., 1., 1., 1., 0., 0., 1., 1., 0., 0.]);
    write_column(dir, "p.csv", "prediction", &[0., 0., 1., 0., 1., 0., 0., 0., 0., 0.]);
    write_column(dir, "s.csv", "score", &[0.1, 0.4, 0.8, 0.3, 0.7, 0.2, 0.35, 0.6, 0.05, 0.5]);
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn evaluate_comparison_table() {
    let dir = tempfile::tempdir().unwrap();
    toy(dir.path());
    let out = run(
        dir.path(),
        &["evaluate", "--labels", "l.csv", "--predictions", "p.csv", "--protocol", "raw,pa,pak,padf", "--d", "0.7,0.9", "--k", "20", "--out", "r.csv"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "protocol,params,threshold,precision,recall,f1");
    let protocols: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(protocols, ["raw", "pa", "pak", "padf", "padf"]);
    assert!(lines[4].starts_with("padf,d=0.7;mode=decayed,"));
    assert!(lines[5].starts_with("padf,d=0.9;mode=decayed,"));
}

#[test]
fn evaluate_sweep_writes_a_single_json_report() {
    let dir = tempfile::tempdir().unwrap();
    toy(dir.path());
    let out = run(
        dir.path(),
        &["evaluate", "--labels", "l.csv", "--scores", "s.csv", "--sweep", "--protocol", "padf", "--d", "0.9", "--out", "r.json"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("r.json"));
    assert_eq!(report["protocol"], "padf");
    assert_eq!(report["d"], 0.9);
    assert_eq!(report["precision_mode"], "decayed");
    assert!(report["threshold"].is_f64());
    assert!(report["flags"].is_array());
}

#[test]
fn sweep_report_matches_evaluating_its_predictions() {
    let dir = tempfile::tempdir().unwrap();
    toy(dir.path());
    for protocol in ["raw", "pa", "pak", "padf"] {
        let out = run(
            dir.path(),
            &["evaluate", "--labels", "l.csv", "--scores", "s.csv", "--sweep", "--protocol", protocol, "--out", "sweep.json"],
        );
        assert_eq!(code(&out), 0);
        let swept = json(&dir.path().join("sweep.json"));
        let theta = swept["threshold"].as_f64().unwrap();

        let scores = [0.1, 0.4, 0.8, 0.3, 0.7, 0.2, 0.35, 0.6, 0.05, 0.5];
        let flags: Vec<f64> = scores.iter().map(|&s| f64::from(u8::from(s > theta))).collect();
        write_column(dir.path(), "chosen.csv", "prediction", &flags);
        let out = run(
            dir.path(),
            &["evaluate", "--labels", "l.csv", "--predictions", "chosen.csv", "--protocol", protocol, "--out", "direct.json"],
        );
        assert_eq!(code(&out), 0);
        let direct = json(&dir.path().join("direct.json"));
        for key in ["precision", "recall", "f1", "flags"] {
            assert_eq!(swept[key], direct[key], "{protocol} {key}");
        }

        let out = run(
            dir.path(),
            &["evaluate", "--labels", "l.csv", "--scores", "s.csv", "--threshold", &theta.to_string(), "--protocol", protocol, "--out", "fixed.json"],
        );
        assert_eq!(code(&out), 0);
        assert_eq!(json(&dir.path().join("fixed.json")), swept);
    }
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    toy(dir.path());
    let cases: &[&[&str]] = &[
        &["evaluate", "--labels", "l.csv", "--predictions", "p.csv", "--protocol", "pak", "--k", "150", "--out", "r.csv"],
        &["evaluate", "--labels", "l.csv", "--predictions", "p.csv", "--sweep", "--protocol", "pa", "--out", "r.csv"],
        &["evaluate", "--labels", "l.csv", "--scores", "s.csv", "--protocol", "pa", "--out", "r.csv"],
        &["evaluate", "--labels", "l.csv", "--predictions", "p.csv", "--out", "r.csv"],
        &["evaluate", "--labels", "l.csv", "--predictions", "p.csv", "--protocol", "padf", "--d", "1.5", "--out", "r.csv"],
        &["evaluate", "--labels", "l.csv", "--predictions", "p.csv", "--protocol", "pa", "--out", "r.txt"],
        &["evaluate", "--labels", "p.csv", "--predictions", "s.csv", "--protocol", "pa", "--out", "r.csv"],
        &["curves", "--theta-grid", "0.5:0.4:0.1", "--out", "c.csv"],
        &["curves", "--theta-grid", "0:1", "--out", "c.csv"],
        &["cases", "--suite", "nope", "--out-dir", "D"],
    ];
    for args in cases {
        let out = run(dir.path(), args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = run(
        dir.path(),
        &["evaluate", "--labels", "l.csv", "--predictions", "p.csv", "--protocol", "pak", "--k", "150", "--out", "r.csv"],
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside [0, 100]"));
}

#[test]
fn bad_label_value_is_reported_with_its_line() {
    let dir = tempfile::tempdir().unwrap();
    toy(dir.path());
    fs::write(dir.path().join("bad.csv"), "label\n0\n1\n2\n").unwrap();
    let out = run(
        dir.path(),
        &["evaluate", "--labels", "bad.csv", "--predictions", "p.csv", "--protocol", "pa", "--out", "r.csv"],
    );
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
}

#[test]
fn io_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    toy(dir.path());
    let out = run(
        dir.path(),
        &["evaluate", "--labels", "missing.csv", "--predictions", "p.csv", "--protocol", "pa", "--out", "r.csv"],
    );
    assert_eq!(code(&out), 1);
    let out = run(
        dir.path(),
        &["evaluate", "--labels", "l.csv", "--predictions", "p.csv", "--protocol", "pa", "--out", "no/such/dir/r.csv"],
    );
    assert_eq!(code(&out), 1);
}

#[test]
fn curves_pa_rows_match_constant_decay_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["curves", "--n", "500", "--anomaly-ratio", "0.05", "--d", "1.0,0.9", "--theta-grid", "0:1:0.01", "--out", "c.csv"]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.path().join("c.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("protocol,n,d,theta,f1"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3 * 101);
    let pa: Vec<_> = rows.iter().filter(|r| r[0] == "pa").map(|r| (r[3], r[4])).collect();
    let d1: Vec<_> = rows.iter().filter(|r| r[0] == "padf" && r[2] == "1").map(|r| (r[3], r[4])).collect();
    assert_eq!(pa.len(), 101);
    assert_eq!(pa, d1);
    assert!(rows.iter().filter(|r| r[3] == "1").all(|r| r[4] == "0.000000"));
}

fn simulate_labels(dir: &Path, n: usize) {
    let mut labels = vec![0.0; 20];
    labels.extend(vec![1.0; n]);
    labels.extend(vec![0.0; 20]);
    write_column(dir, "sim.csv", "label", &labels);
}

#[test]
fn simulate_single_trial_has_zero_variance() {
    let dir = tempfile::tempdir().unwrap();
    simulate_labels(dir.path(), 10);
    let out = run(dir.path(), &["simulate", "--labels", "sim.csv", "--protocol", "raw,pa,padf", "--trials", "1", "--seed", "4", "--out", "s.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stats = json(&dir.path().join("s.json"));
    for entry in stats.as_array().unwrap() {
        for metric in ["precision", "recall", "f1"] {
            assert_eq!(entry[metric]["variance"], 0.0);
        }
    }
}

#[test]
fn simulate_is_deterministic_and_honours_the_seed_variable() {
    let dir = tempfile::tempdir().unwrap();
    simulate_labels(dir.path(), 10);
    let args = ["simulate", "--labels", "sim.csv", "--protocol", "pa,padf", "--trials", "20", "--seed", "7", "--out"];
    let a = run(dir.path(), &[&args[..], &["a.json"]].concat());
    let b = run(dir.path(), &[&args[..], &["b.json"]].concat());
    assert_eq!(code(&a), 0);
    assert_eq!(code(&b), 0);
    let a = fs::read(dir.path().join("a.json")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.json")).unwrap());

    let out = bin()
        .current_dir(dir.path())
        .env("TSAD_EVAL_SEED", "7")
        .args(["simulate", "--labels", "sim.csv", "--protocol", "pa,padf", "--trials", "20", "--out", "c.json"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(a, fs::read(dir.path().join("c.json")).unwrap());
}

#[test]
fn simulate_pa_recall_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    simulate_labels(dir.path(), 500);
    let out = run(dir.path(), &["simulate", "--labels", "sim.csv", "--protocol", "pa", "--trials", "1000", "--threshold", "0.9", "--out", "s.json"]);
    assert_eq!(code(&out), 0);
    let stats = json(&dir.path().join("s.json"));
    let mean = stats["recall"]["mean"].as_f64().unwrap();
    assert!((mean - (1.0 - 0.9f64.powi(500))).abs() < 0.01);
    assert_eq!(stats["threshold_mode"], "fixed");
}

#[test]
fn cases_suite_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["cases", "--suite", "appendix-d", "--d", "0.9", "--precision-mode", "adjusted", "--out-dir", "D"]);
    assert_eq!(code(&out), 0);
    let table = fs::read_to_string(dir.path().join("D/table.csv")).unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout), table);
    let f1 = |id: &str| -> f64 {
        let line = table.lines().find(|l| l.starts_with(&format!("{id},"))).unwrap();
        line.rsplit(',').next().unwrap().parse().unwrap()
    };
    assert!((f1("c") - 0.95).abs() <= 0.005);
    assert_eq!(f1("a"), 0.0);
    assert!(f1("l") < 1.0);
    assert!((f1("l") - 0.93).abs() <= 0.005);
    assert!(dir.path().join("D/case_c_labels.csv").exists());
    assert!(dir.path().join("D/case_c_predictions.csv").exists());

    // the written series evaluate back to the table row
    let out = run(
        dir.path(),
        &["evaluate", "--labels", "D/case_c_labels.csv", "--predictions", "D/case_c_predictions.csv", "--protocol", "padf", "--d", "0.9", "--precision-mode", "adjusted", "--out", "c.json"],
    );
    assert_eq!(code(&out), 0);
    assert_eq!(json(&dir.path().join("c.json"))["f1"], 0.947368);
}
