//! End-to-end tests of the `wprobe` binary: file outputs, validation
//! errors and exit codes, determinism across thread counts, config
//! round-trips, and agreement with the library computed in-process.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn wprobe() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wprobe"))
}

fn repo_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run_ok(args: &[&str]) -> Output {
    let out = wprobe().args(args).output().expect("spawn wprobe");
    assert!(
        out.status.success(),
        "wprobe {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn respond_single_tooth_has_no_cross_terms() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"comb": {"shape": "gaussian", "eta": 0.1, "tau0": 0.0, "zeta": 1.0, "teeth": 1},
            "state": {"kind": "single_mode", "omega": 1.0, "n": 0.0},
            "output": {"directory": "unused", "stem": "t"}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    run_ok(&[
        "respond",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let csv = fs::read_to_string(out.join("t_respond.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,local_term");
    assert!(lines[1].starts_with("0,"));
    assert_eq!(lines[2], "p_total,re_c,im_c,err_est");
    let summary: Vec<&str> = lines[3].split(',').collect();
    // one tooth: no cross terms
    assert_eq!(summary[1], "0");
    assert_eq!(summary[2], "0");
    // manifest lists every produced file
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("t_manifest.json")).unwrap()).unwrap();
    let outputs: Vec<String> = manifest["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    for f in ["t_config.json", "t_respond.csv", "t_respond.json"] {
        assert!(outputs.contains(&f.to_string()), "{f} missing from {outputs:?}");
    }
}

#[test]
fn respond_matches_library_byte_for_byte() {
    use wprobe_core::correlators::{closed_form_pullback, CorrelatorSpec, FieldState};
    use wprobe_core::response::{excitation_probability, Detector};
    use wprobe_core::switching::{Comb, ToothShape};
    use wprobe_core::trajectories::Worldline;

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"detector": {"gap": 2.0, "lambda": 0.01},
            "trajectory": {"kind": "uniformly_accelerated", "a": 1.0},
            "comb": {"shape": "smooth_bump", "eta": 0.05, "tau0": 0.0, "zeta": 1.0, "teeth": 2},
            "regulator": {"epsilon": 0.001},
            "output": {"directory": "unused", "stem": "acc"}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    run_ok(&[
        "respond",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);

    // same numbers through the library, formatted the same way
    let corr = closed_form_pullback(&CorrelatorSpec {
        mass: 0.0,
        dim: 3,
        state: FieldState::Vacuum,
        trajectory: Worldline::uniformly_accelerated(1.0, 3).unwrap(),
        epsilon: 0.001,
    })
    .unwrap();
    let comb = Comb::new(ToothShape::SmoothBump, 0.05, 0.0, 1.0, 2).unwrap();
    let det = Detector::new(2.0, 0.01).unwrap();
    let quad = wprobe_core::QuadConfig64 {
        rel_tol: 1e-9,
        abs_tol: 1e-13,
        max_depth: 12,
        max_panels: 40_000,
    };
    let outcome = excitation_probability(&comb, &det, &corr, &quad).unwrap();

    let mut want = String::from("n,local_term\n");
    for (n, local) in outcome.local_terms.iter().enumerate() {
        want.push_str(&format!("{n},{local}\n"));
    }
    want.push_str("p_total,re_c,im_c,err_est\n");
    want.push_str(&format!(
        "{},{},{},{}\n",
        outcome.total, outcome.nonlocal.re, outcome.nonlocal.im, outcome.error_estimate
    ));
    let got = fs::read_to_string(out.join("acc_respond.csv")).unwrap();
    assert_eq!(got, want);
}

#[test]
fn unknown_key_rejected_with_exit_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"detecter": {"gap": 1.0}}"#).unwrap();
    let out = wprobe()
        .args(["respond", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("detecter"), "{stderr}");
}

#[test]
fn empty_zeta_grid_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"protocol": {"zeta_grid": []}}"#).unwrap();
    let out = wprobe()
        .args([
            "reconstruct",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.path().join("o").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn one_dimensional_massless_scaling_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"scaling": {"dims": [1]}}"#).unwrap();
    let out = wprobe()
        .args([
            "scaling",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.path().join("o").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("infrared"), "{stderr}");
}

#[test]
fn outputs_are_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"detector": {"gap": 2.0, "lambda": 0.01},
            "trajectory": {"kind": "uniformly_accelerated", "a": 1.0},
            "comb": {"shape": "smooth_bump", "eta": 0.05, "tau0": 0.0, "zeta": 1.0, "teeth": 3},
            "output": {"directory": "unused", "stem": "det"}}"#,
    )
    .unwrap();
    let mut results = Vec::new();
    for threads in ["1", "2"] {
        let out = dir.path().join(format!("out{threads}"));
        run_ok(&[
            "respond",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--threads",
            threads,
        ]);
        results.push((
            fs::read_to_string(out.join("det_respond.csv")).unwrap(),
            fs::read_to_string(out.join("det_respond.json")).unwrap(),
        ));
    }
    assert_eq!(results[0], results[1], "outputs differ across thread counts");
}

#[test]
fn resolved_config_round_trips_to_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"state": {"kind": "single_mode", "omega": 1.3, "n": 1.0},
            "comb": {"shape": "gaussian", "eta": 0.08, "tau0": 0.2, "zeta": 0.9, "teeth": 2},
            "output": {"directory": "unused", "stem": "rt"}}"#,
    )
    .unwrap();
    let out1 = dir.path().join("o1");
    run_ok(&[
        "respond",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out1.to_str().unwrap(),
    ]);
    // feed the resolved echo back in
    let echo = out1.join("rt_config.json");
    let out2 = dir.path().join("o2");
    run_ok(&[
        "respond",
        "--config",
        echo.to_str().unwrap(),
        "--out",
        out2.to_str().unwrap(),
    ]);
    for file in ["rt_respond.csv", "rt_respond.json", "rt_config.json"] {
        assert_eq!(
            fs::read_to_string(out1.join(file)).unwrap(),
            fs::read_to_string(out2.join(file)).unwrap(),
            "{file} differs after config round-trip"
        );
    }
}

#[test]
fn sweep_outputs_extrapolation_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"detector": {"gap": 1.2, "lambda": 0.01},
            "state": {"kind": "single_mode", "omega": 1.0, "n": 0.0},
            "comb": {"shape": "gaussian", "eta": 0.1, "tau0": 0.0, "zeta": 1.0, "teeth": 2},
            "sweep": {"etas": [0.1, 0.05, 0.025], "extrapolation_order": 2},
            "output": {"directory": "unused", "stem": "sw"}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    run_ok(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("sw_sweep.json")).unwrap()).unwrap();
    let ext = report["extrapolant_re"].as_f64().unwrap();
    let limit = report["delta_limit_re"].as_f64().unwrap();
    assert!(
        (ext - limit).abs() < 1e-3,
        "sweep extrapolant {ext} vs delta limit {limit}"
    );
    let csv = fs::read_to_string(out.join("sw_sweep.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "eta,re_c,im_c");
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn reconstruct_demo_config_hits_the_closed_form() {
    // the shipped configuration, as shipped: every lapse within 2%
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    run_ok(&[
        "reconstruct",
        "--config",
        repo_config("accelerated_unruh.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let csv = fs::read_to_string(out.join("accelerated_unruh_reconstruct.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        let cells: Vec<&str> = row.split(',').collect();
        let zeta: f64 = cells[0].parse().unwrap();
        let re: f64 = cells[1].parse().unwrap();
        let im: f64 = cells[2].parse().unwrap();
        let rel: f64 = cells[6].parse().unwrap();
        assert!(rel < 0.02, "zeta={zeta}: rel err {rel}");
        assert!(im.abs() <= 1e-3 * re.abs(), "zeta={zeta}: Im {im} vs Re {re}");
    }
    // the convergence report carries the per-width statistics
    let convergence: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(out.join("accelerated_unruh_reconstruct_convergence.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(convergence.as_array().unwrap().len(), 3);
    let first = &convergence[0];
    assert_eq!(first["even"]["s_values"].as_array().unwrap().len(), 4);
}

#[test]
fn reconstruct_routes_agree() {
    let dir = tempfile::tempdir().unwrap();
    // one lapse is enough to compare the two routes
    let base: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(repo_config("accelerated_unruh.json")).unwrap(),
    )
    .unwrap();
    let mut measured = base.clone();
    measured["protocol"]["zeta_grid"] = serde_json::json!([1.0]);
    let mut direct = measured.clone();
    direct["protocol"]["route"] = serde_json::json!("direct");

    let mut values = Vec::new();
    for (name, cfg_json) in [("m", measured), ("d", direct)] {
        let cfg = dir.path().join(format!("{name}.json"));
        fs::write(&cfg, serde_json::to_string(&cfg_json).unwrap()).unwrap();
        let out = dir.path().join(name);
        run_ok(&[
            "reconstruct",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        let csv = fs::read_to_string(out.join("accelerated_unruh_reconstruct.csv")).unwrap();
        let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        let re: f64 = row[1].parse().unwrap();
        let im: f64 = row[2].parse().unwrap();
        let rel: f64 = row[6].parse().unwrap();
        assert!(rel < 0.02, "{name}: rel err {rel}");
        values.push((re, im));
    }
    let (rm, im_) = values[0];
    let (rd, id_) = values[1];
    assert!(
        ((rm - rd).powi(2) + (im_ - id_).powi(2)).sqrt() < 1e-6,
        "routes disagree: {values:?}"
    );
}

#[test]
fn reconstruct_single_mode_demo_recovers_the_phase() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    run_ok(&[
        "reconstruct",
        "--config",
        repo_config("single_mode.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let csv = fs::read_to_string(out.join("single_mode_reconstruct.csv")).unwrap();
    for row in csv.lines().skip(1) {
        let cells: Vec<&str> = row.split(',').collect();
        let zeta: f64 = cells[0].parse().unwrap();
        let re: f64 = cells[1].parse().unwrap();
        let im: f64 = cells[2].parse().unwrap();
        // ground state of one mode: W(zeta) = e^{-i zeta}
        assert!((re - zeta.cos()).abs() < 1e-3, "zeta={zeta}: Re {re}");
        assert!((im + zeta.sin()).abs() < 1e-3, "zeta={zeta}: Im {im}");
    }
}

#[test]
fn scaling_demo_config_reports_expected_slope() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    run_ok(&[
        "scaling",
        "--config",
        repo_config("scaling_3d.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let reports: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("scaling_3d_scaling.json")).unwrap())
            .unwrap();
    let arr = reports.as_array().unwrap();
    assert_eq!(arr.len(), 2);
    for report in arr {
        let dim = report["dim"].as_u64().unwrap();
        let slope = report["fitted_slope"].as_f64().unwrap();
        let want = 1.0 - dim as f64;
        assert!(
            (slope - want).abs() < 0.05,
            "d={dim}: slope {slope} vs {want}"
        );
        if dim == 3 {
            let coeff = report["fitted_coefficient"].as_f64().unwrap();
            let pinned = 1.0 / (64.0 * std::f64::consts::PI.powi(2));
            assert!(
                (coeff / pinned - 1.0).abs() < 0.01,
                "coefficient {coeff} vs {pinned}"
            );
        }
    }
}
