use std::fs;
use std::process::Command;

use hoelder_sr::cli::{emit_report, run_experiment, ExperimentConfig, OutputFormat, ReportBundle};

const SCALING: &str =
    "kind = scaling\nmodel.kind = heisenberg\nscaling.epsilons = 0.1, 0.05, 0.02, 0.01\n";

#[test]
fn scaling_run_is_deterministic_and_round_trips() {
    let cfg = ExperimentConfig::parse(SCALING, None).unwrap();
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    assert_eq!(a.tables, b.tables);
    assert_eq!(a.exit_code(), 0);
    let table = &a.tables[0];
    assert_eq!(
        table.header,
        ["epsilon", "d_r", "d_hat", "lower_bound", "violation"]
    );
    assert_eq!(table.rows.len(), 4);
    let slope = a.outputs["fitted_slope"].as_f64().unwrap();
    assert!((slope - 0.5).abs() < 0.05);

    let json = a.to_json().unwrap();
    let back = ReportBundle::from_json(&json).unwrap();
    assert_eq!(back.hash().unwrap(), a.hash().unwrap());

    let dir = tempfile::tempdir().unwrap();
    emit_report(&a, OutputFormat::Csv, dir.path()).unwrap();
    let first = fs::read(dir.path().join("scaling.csv")).unwrap();
    emit_report(&b, OutputFormat::Csv, dir.path()).unwrap();
    assert_eq!(fs::read(dir.path().join("scaling.csv")).unwrap(), first);
}

#[test]
fn every_report_states_its_constants() {
    let cfg = ExperimentConfig::parse("kind = limits\nconstants.c_m = 0.0795774715459477\n", None)
        .unwrap();
    let r = run_experiment(&cfg).unwrap();
    let b = r.bundle.unwrap();
    assert_eq!(r.constants["c"], b.c);
    assert_eq!(r.constants["rho"], b.rho);
    assert!(r.passed());
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_hsr");
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        fs::write(&p, text).unwrap();
        p
    };

    let bad_theta = write("bad.kv", "kind = dist\nmodel.theta = 1.5\n");
    let out = Command::new(exe)
        .arg("run")
        .arg("--config")
        .arg(&bad_theta)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("theta must lie in (0,1)"));

    let typo = write("typo.kv", "kind = probe\nprobe.epsilon = 0.1\n");
    let out = Command::new(exe)
        .arg("run")
        .arg("--config")
        .arg(&typo)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("probe.epsilon"));

    let ok = write("limits.kv", "kind = limits\n");
    let outdir = dir.path().join("out");
    let out = Command::new(exe)
        .args(["limits", "--seed", "3", "--format", "json", "--config"])
        .arg(&ok)
        .arg("--out")
        .arg(&outdir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let summary = fs::read_to_string(outdir.join("summary.json")).unwrap();
    assert!(summary.contains("\\nseed = 3\\n"));
    assert!(!outdir.join("limits.csv").exists());

    let fol = write(
        "fol.kv",
        "kind = scaling\nmodel.kind = foliation\nscaling.epsilons = 0.1, 0.05, 0.02\n",
    );
    let out = Command::new(exe)
        .arg("run")
        .arg("--config")
        .arg(&fol)
        .arg("--out")
        .arg(dir.path().join("fol"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
