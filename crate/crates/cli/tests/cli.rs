use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn cclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cclab")).args(args).output().expect("spawn cclab")
}

fn ok_json(args: &[&str]) -> Value {
    let o = cclab(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn sample_is_seeded() {
    let a = cclab(&["sample", "--n", "30", "--p", "1/2", "--seed", "9"]);
    let b = cclab(&["--seed", "9", "sample", "--n", "30", "--p", "0.5"]);
    let c = cclab(&["sample", "--n", "30", "--p", "1/2", "--seed", "10"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let m: usize = text.lines().next().unwrap().split_whitespace().nth(1).unwrap().parse().unwrap();
    assert_eq!(text.lines().count(), m + 1);
}

#[test]
fn solvers_on_a_path() {
    let dir = scratch("path");
    let g = dir.join("p5.txt");
    fs::write(&g, "5 4\n0 1\n1 2\n2 3\n3 4\n").unwrap();
    let g = g.to_str().unwrap();
    let a = ok_json(&["solve-alpha", "--graph", g, "--t", "1", "--exact"]);
    assert_eq!(a["size"], 3);
    assert_eq!(a["status"], "optimal");
    assert_eq!(a["witness"], serde_json::json!([0, 2, 4]));
    let a2 = ok_json(&["solve-alpha", "--graph", g, "--t", "2"]);
    assert_eq!(a2["size"], 4);
    let c = ok_json(&["solve-chi", "--graph", g, "--t", "1"]);
    assert_eq!(c["num_colors"], 2);
    let c2 = ok_json(&["solve-chi", "--graph", g, "--t", "5", "--heuristic"]);
    assert_eq!(c2["num_colors"], 1);
    let gc = ok_json(&["greedy-color", "--graph", g, "--t", "2", "--k", "4", "--seed", "1"]);
    assert!(gc["num_colors"].as_u64().unwrap() >= 2);
}

#[test]
fn bad_graph_file_reports_line() {
    let dir = scratch("badgraph");
    let g = dir.join("bad.txt");
    fs::write(&g, "3 1\n2 1\n").unwrap();
    let o = cclab(&["solve-alpha", "--graph", g.to_str().unwrap(), "--t", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn numeric_subcommands() {
    let e = ok_json(&["expectation", "--n", "4", "--k", "3", "--t", "2", "--p", "1/2", "--mode", "exact"]);
    assert_eq!(e["exact_numerator"], "2");
    assert_eq!(e["exact_denominator"], "1");
    let l = ok_json(&["expectation", "--n", "4", "--k", "3", "--t", "2", "--p", "1/2", "--mode", "log"]);
    assert!(l["exact_numerator"].is_null());
    assert!((l["log_expectation"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-12);

    let k = ok_json(&["kappa", "--tau", "1"]);
    assert!((k["kappa"].as_f64().unwrap() - 3.0).abs() < 1e-8);

    let sp = ok_json(&["partition-count", "--t", "2", "--k", "4"]);
    assert_eq!(sp["count"], "10");
    let b = ok_json(&["partition-count", "--t", "5", "--k", "5", "--which", "bell"]);
    assert_eq!(b["count"], "52");

    let p = ok_json(&["predict", "--n", "100", "--p", "1/2", "--t", "2"]);
    assert!((p["alpha_small"]["center"].as_f64().unwrap() - 10.79).abs() < 0.01);

    let r = ok_json(&["bounds-check", "--id", "large-t-upper", "--n", "1000", "--p", "0.5", "--t", "20", "--k", "40"]);
    assert_eq!(r["bound_id"], "large-t-upper");
    assert_eq!(
        cclab(&["bounds-check", "--id", "nope", "--n", "1", "--p", "0.5", "--t", "1", "--k", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn figure1_csv_has_schema_column() {
    let o = cclab(&["figure1", "--tau-min", "1", "--tau-max", "4", "--step", "1"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("schema,tau,kappa,residual"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.starts_with("cclab-figure1/1,")));
}

#[test]
fn experiment_exit_codes_and_determinism() {
    let dir = scratch("exp");
    let empty = dir.join("empty.toml");
    fs::write(&empty, "seed = 1\n").unwrap();
    let out = dir.join("empty-out");
    let o = cclab(&["experiment", "--config", empty.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(!out.exists());

    let cfg = dir.join("conc.toml");
    fs::write(
        &cfg,
        r#"
seed = 11
[[experiment]]
id = "conc"
kind = "concentration"
n = 30
p = "1/2"
t = 1
samples = 10
method = "exact"
[experiment.assert]
max_spread = 30

[[experiment]]
id = "impossible"
kind = "expectation_scan"
n = 50
p = "1/2"
t = 2
k_min = 2
k_max = 6
[experiment.assert]
strictly_decreasing = true
"#,
    )
    .unwrap();
    let run = |sub: &str| {
        let d = dir.join(sub);
        let o = cclab(&["experiment", "--config", cfg.to_str().unwrap(), "--out", d.to_str().unwrap()]);
        (o, fs::read(d.join("conc.csv")).unwrap())
    };
    let (o1, csv1) = run("a");
    let (o2, csv2) = run("b");
    assert_eq!(csv1, csv2);
    // E rises from k = 2 to 6 at n = 50, so the monotonicity assertion fails
    assert_eq!(o1.status.code(), Some(1));
    assert_eq!(o2.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o1.stderr).contains("FAIL impossible"));
    let report: Value = serde_json::from_slice(&o1.stdout).unwrap();
    assert_eq!(report["experiments"][0]["passed"], true);

    let broken = dir.join("broken.toml");
    fs::write(&broken, "seed = 1\n[[experiment]]\nid = 'x'\nkind = 'figure1'\ntau_min = 'a'\n").unwrap();
    let o = cclab(&["experiment", "--config", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
}

#[test]
fn bundled_smoke_config_passes() {
    let cfg = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/smoke.toml");
    let out = scratch("smoke");
    let o = cclab(&["experiment", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for id in ["alpha1-n20", "scan-n1000", "kappa-coarse", "overlap-vacuous"] {
        assert!(out.join(format!("{id}.csv")).exists(), "{id}");
    }
}
