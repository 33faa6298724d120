//! End-to-end runs of the `mfpce` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mfpce(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mfpce"))
        .args(args)
        .env("MFPCE_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = mfpce(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn read_rows(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn one_d_lf(x: f64) -> f64 {
    (2.0 * std::f64::consts::PI * x).sin()
}

fn one_d_hf(x: f64) -> f64 {
    (x / 4.0 - std::f64::consts::SQRT_2) * (2.0 * std::f64::consts::PI * x + std::f64::consts::PI).sin()
}

/// HF CSV on an even grid that stays clear of the LF zeros.
fn write_hf(path: &Path, n: usize, f: impl Fn(f64) -> f64) {
    let mut s = String::from("x1,y\n");
    for i in 0..n {
        let x = 0.05 + 1.9 * (i as f64 + 0.37) / n as f64;
        s.push_str(&format!("{x:e},{:e}\n", f(x)));
    }
    fs::write(path, s).unwrap();
}

#[test]
fn sample_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a.csv"), dir.path().join("b.csv"), dir.path().join("c.csv"));
    ok(&["sample", "--rv", "pair:truss", "--n", "25", "--seed", "9", "--out", p(&a)]);
    ok(&["sample", "--rv", "pair:truss", "--n", "25", "--seed", "9", "--out", p(&b)]);
    ok(&["sample", "--rv", "pair:truss", "--n", "25", "--seed", "10", "--out", p(&c)]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
    let (header, rows) = read_rows(&a);
    assert_eq!(header.len(), 10);
    assert_eq!(header[0], "x1");
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().all(|r| r[0] > 0.0 && r[4] > 0.0));
}

#[test]
fn train_mf_recovers_a_pure_scaling() {
    let dir = tempfile::tempdir().unwrap();
    let hf = dir.path().join("hf.csv");
    let model = dir.path().join("model.json");
    write_hf(&hf, 30, |x| 3.0 * one_d_lf(x));
    let report = ok(&[
        "train-mf", "--hf", p(&hf), "--lf", "builtin:oneD_lf", "--rv", "pair:oneD", "--seed", "1", "--out", p(&model),
    ]);
    let v: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert!((v["rho"].as_f64().unwrap() - 3.0).abs() < 1e-12, "{report}");
    assert_eq!(v["lf"]["builtin"], "oneD_lf");
    assert!(model.is_file());
    let summary = ok(&["report", p(&model)]);
    assert!(summary.contains("\"rho\""));
}

#[test]
fn intervals_build_store_and_reuse_an_ensemble() {
    let dir = tempfile::tempdir().unwrap();
    let hf = dir.path().join("hf.csv");
    let query = dir.path().join("q.csv");
    let ens = dir.path().join("ens");
    let (out1, out2) = (dir.path().join("i1.csv"), dir.path().join("i2.csv"));
    // deterministic pseudo-noise keeps the test reproducible without a RNG
    write_hf(&hf, 40, |x| one_d_hf(x) + 0.05 * (97.0 * x).sin());
    fs::write(&query, "x1\n0.1\n0.6\n1.3\n1.95\n").unwrap();
    let args = |out: &Path| {
        vec![
            "intervals".to_string(), "--ensemble".into(), p(&ens).into(), "--query".into(), p(&query).into(),
            "--alpha".into(), "0.05,0.25".into(), "--nb".into(), "40".into(), "--out".into(), p(out).into(),
            "--hf".into(), p(&hf).into(), "--lf".into(), "builtin:oneD_lf".into(), "--rv".into(), "pair:oneD".into(),
            "--n-lf".into(), "60".into(), "--seed".into(), "3".into(),
        ]
    };
    let a1 = args(&out1);
    ok(&a1.iter().map(String::as_str).collect::<Vec<_>>());
    for f in ["ensemble.json", "model.json", "noise.json", "model_0000.json", "model_0039.json"] {
        assert!(ens.join(f).is_file(), "{f}");
    }
    let a2 = args(&out2);
    ok(&a2.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(fs::read(&out1).unwrap(), fs::read(&out2).unwrap());

    let (header, rows) = read_rows(&out1);
    assert_eq!(header[..3], ["x1", "mean", "prediction"]);
    assert_eq!(header.len(), 3 + 8);
    assert_eq!(rows.len(), 4);
    for r in &rows {
        for k in 0..2 {
            let (cl, ch, pl, ph) = (r[3 + 4 * k], r[4 + 4 * k], r[5 + 4 * k], r[6 + 4 * k]);
            assert!(cl <= ch && pl <= ph);
            // with few members PI/CI enclosure is only statistical; the mean is not
            assert!(cl <= r[1] && r[1] <= ch, "{r:?}");
            assert!(ph - pl > 0.0);
        }
        // the 90% band contains the 50% band
        assert!(r[3] <= r[7] && r[8] <= r[4]);
    }
    let rep = ok(&["report", p(&ens)]);
    assert!(rep.contains("n_b"));
}

#[test]
fn convergence_benchmark_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("conv");
    ok(&[
        "benchmark", "convergence", "oneD", "--nh", "10,20", "--nrep", "2", "--ntest", "500", "--seed", "4",
        "--out-dir", p(&out),
    ]);
    let (header, rows) = read_rows(&out.join("convergence.csv"));
    assert_eq!(header.len(), 5);
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[2] >= 0.0 && r[3] >= 0.0));
    assert!(out.join("manifest.json").is_file());
    let summary = ok(&["report", p(&out.join("convergence.csv"))]);
    assert!(summary.contains("median_eps_mf"));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let code = |a: &[&str]| mfpce(a).status.code();
    assert_eq!(code(&["benchmark", "convergence", "nope"]), Some(2));
    assert_eq!(code(&["sample", "--rv", "pair:oneD", "--n", "5", "--out", p(&out)]), Some(2));
    assert_eq!(code(&["sample", "--rv", "pair:nope", "--n", "5", "--seed", "1", "--out", p(&out)]), Some(2));
    assert_eq!(code(&["report", p(&dir.path().join("missing.json"))]), Some(2));
    assert_eq!(code(&["frobnicate"]), Some(2));
    assert!(!out.exists());
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    fs::write(&cfg, r#"{"seed": 9}"#).unwrap();
    ok(&["--config", p(&cfg), "sample", "--rv", "pair:oneD", "--n", "8", "--out", p(&a)]);
    ok(&["sample", "--rv", "pair:oneD", "--n", "8", "--seed", "9", "--out", p(&b)]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    fs::write(&cfg, r#"{"sede": 9}"#).unwrap();
    assert_eq!(mfpce(&["--config", p(&cfg), "sample", "--rv", "pair:oneD", "--n", "8", "--out", p(&a)]).status.code(), Some(2));
}
