use std::process::Command;

use actionforge::registry::{builtin_cases, builtin_configs, Case, CaseConfig};

fn actionforge(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_actionforge")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into(), String::from_utf8_lossy(&out.stderr).into())
}

#[test]
fn list_names_eleven_cases() {
    let (code, out, _) = actionforge(&["list"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 11);
    assert!(out.lines().any(|l| l.starts_with("airy ")));
}

#[test]
fn describe_emits_a_parseable_config() {
    let (code, out, _) = actionforge(&["describe", "telegraph"]);
    assert_eq!(code, 0);
    let cfg = CaseConfig::from_json(&out).unwrap();
    assert_eq!(cfg.params["d0"], "1/2");
    Case::from_config(cfg).unwrap();
}

#[test]
fn usage_and_unknown_case_exit_2() {
    assert_eq!(actionforge(&["verify", "no-such-case"]).0, 2);
    assert_eq!(actionforge(&["run", "no-such-case"]).0, 2);
    assert_eq!(actionforge(&["describe"]).0, 2);
    assert_eq!(actionforge(&["bogus"]).0, 2);
    assert_eq!(actionforge(&["verify-all", "--jobs", "x"]).0, 2);
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let (code, _, err) = actionforge(&["run", "beam", "--config", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
    std::fs::write(&bad, r#"{"params": {"tau0": "-1"}}"#).unwrap();
    assert_eq!(actionforge(&["verify", "nsw", "--config", bad.to_str().unwrap()]).0, 2);
}

#[test]
fn verify_passes_and_forced_tolerance_fails() {
    let (code, out, _) = actionforge(&["verify", "wave-delta-trick"]);
    assert_eq!(code, 0, "{out}");
    let line = out.lines().find(|l| l.contains("delta_trick:equivalence")).unwrap();
    assert!(line.contains("PASS"));
    let (code, out, _) = actionforge(&["verify", "beam", "--tolerance", "0"]);
    assert_eq!(code, 1, "{out}");
    assert!(out.lines().any(|l| l.contains("FAIL") && l.contains("conserved:mass")));
}

#[test]
fn sabotaged_tolerance_through_config_fails() {
    let dir = tempfile::tempdir().unwrap();
    let patch = dir.path().join("p.json");
    std::fs::write(&patch, r#"{"checks": [{"kind": "conserved", "density": "mass", "tol": 0.0}]}"#).unwrap();
    assert_eq!(actionforge(&["verify", "diffusion", "--config", patch.to_str().unwrap()]).0, 1);
}

#[test]
fn run_writes_traces_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, _, err) = actionforge(&["run", "advection", "--out", out, "--samples", "5", "--grid", "128"]);
    assert_eq!(code, 0, "{err}");
    let case = dir.path().join("advection");
    for f in ["H_triv.csv", "H_M.csv", "report.json", "manifest.json", "u_0004.csv"] {
        assert!(case.join(f).exists(), "{f}");
    }
    let csv = std::fs::read_to_string(case.join("H_triv.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(case.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["case"], "advection");
    let check = &report["checks"][0];
    for key in ["case", "check", "kind", "metric", "tolerance", "pass"] {
        assert!(!check[key].is_null(), "{key}");
    }
}

#[test]
fn run_records_quadrature_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let patch = dir.path().join("q.json");
    std::fs::write(&patch, r#"{"solver": {"quad_nodes": 128}, "checks": [{"kind": "conserved", "density": "mass"}]}"#).unwrap();
    let (code, _, err) =
        actionforge(&["run", "fractional-half", "--config", patch.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let report = std::fs::read_to_string(dir.path().join("fractional-half/report.json")).unwrap();
    assert!(report.contains("m_nodes=128"));
}

#[test]
fn run_exits_0_even_when_checks_fail() {
    let dir = tempfile::tempdir().unwrap();
    let patch = dir.path().join("p.json");
    std::fs::write(&patch, r#"{"checks": [{"kind": "conserved", "density": "mass", "tol": 0.0}]}"#).unwrap();
    let (code, _, _) = actionforge(&["run", "beam", "--config", patch.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
}

#[test]
fn shear_wave_residual_trace() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = actionforge(&["run", "shear-wave", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let csv = std::fs::read_to_string(dir.path().join("shear-wave/residual_dt_c0_2_lap.csv")).unwrap();
    let worst = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap()).fold(0.0, f64::max);
    assert!(worst <= 1e-10, "{worst}");
}

#[test]
fn full_config_round_trip() {
    for (cfg, case) in builtin_configs().into_iter().zip(builtin_cases()) {
        let json = cfg.to_json();
        let back = Case::from_config(CaseConfig::from_json(&json).unwrap()).unwrap();
        assert_eq!(back, case, "{}", cfg.name);
    }
}
