use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use super::checks::{run_check, CheckConfig, Context, Outputs};
use super::{Case, CaseConfig};
use crate::density::{parse_density, DensityKind};
use crate::diagnostics::{hamiltonian_trace, CheckReport, TestFunction, TraceSeries};
use crate::error::{Error, Result};
use crate::field::{write_binary, write_csv_1d, Field};
use crate::solver::{solve_causal_with, SolveOptions, Trajectory};
use crate::symbol::DiffOp;

#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub case: String,
    pub notes: Vec<String>,
    pub checks: Vec<CheckReport>,
    #[serde(skip)]
    pub traces: Vec<(String, TraceSeries)>,
    #[serde(skip)]
    pub wall: Duration,
}

impl CaseReport {
    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }
}

/// The evaluated case together with its main trajectory.
pub struct CaseOutcome {
    pub report: CaseReport,
    pub trajectory: Trajectory,
}

fn main_order(case: &Case) -> Result<usize> {
    let mut order = case.operator.time_order().saturating_sub(1) as usize;
    for d in &case.densities {
        order = order.max(d.hamiltonian(&case.operator, &case.params)?.required_order());
    }
    for c in &case.config.checks {
        match c {
            CheckConfig::RateIdentity { .. } => order = order.max(1),
            CheckConfig::Residual { operator, .. } => {
                let op = DiffOp::parse_with(operator, case.grid.dim, &case.params)?;
                order = order.max(op.time_order() as usize);
            }
            _ => {}
        }
    }
    Ok(order)
}

fn stationarity_setup(case: &Case) -> Result<Option<(Trajectory, TestFunction)>> {
    let mut order = None;
    for c in &case.config.checks {
        let names: Vec<&String> = match c {
            CheckConfig::Stationary { density, .. } => vec![density],
            CheckConfig::CombinedStationary { densities, .. } => densities.iter().collect(),
            _ => continue,
        };
        for name in names {
            let l = parse_density(name)?.build(&case.operator, &case.params)?;
            order = Some(order.unwrap_or(0).max(l.required_order()));
        }
    }
    let Some(order) = order else { return Ok(None) };
    let s = &case.config.solver.stationarity;
    if !(s.t0 > 0.0 && s.t1 > s.t0 && s.dt > 0.0) {
        return Err(Error::Config("stationarity window needs 0 < t0 < t1 and dt > 0".into()));
    }
    let count = ((s.t1 - s.t0) / s.dt).round() as usize + 1;
    let times: Vec<f64> = (0..count).map(|i| s.t0 + i as f64 * s.dt).collect();
    let opts = SolveOptions { order: Some(order), quad_nodes: case.config.solver.quad_nodes };
    let traj = solve_causal_with(&case.operator, &case.source, &case.grid, &times, &opts)?;
    let margin = (s.t1 - s.t0) / 6.0;
    let h = TestFunction::new(Field::gaussian(&case.grid, None, s.sigma, 1.0), s.t0 + margin, s.t1 - margin)?;
    Ok(Some((traj, h)))
}

/// Solves the case and runs every declared check.
pub fn evaluate_case(case: &Case) -> Result<CaseOutcome> {
    let start = Instant::now();
    let opts = SolveOptions { order: Some(main_order(case)?), quad_nodes: case.config.solver.quad_nodes };
    let traj = solve_causal_with(&case.operator, &case.source, &case.grid, &case.times, &opts)?;
    let mut traces = Vec::new();
    for (spec, d) in case.config.densities.iter().zip(&case.densities) {
        let h = d.hamiltonian(&case.operator, &case.params)?;
        let mut t = hamiltonian_trace(&h, &traj)?;
        t.label = spec.clone();
        traces.push((spec.clone(), t));
    }
    let stationarity = stationarity_setup(case)?;
    let cx = Context { case, traj: &traj, traces: &traces, stationarity: stationarity.as_ref() };
    let mut out = Outputs::default();
    out.notes.push(format!("m_nodes={}", case.config.solver.quad_nodes));
    out.notes.push(format!("operator {}", case.operator));
    for c in &case.config.checks {
        run_check(c, &cx, &mut out)?;
    }
    for t in out.traces {
        let name = t.label.clone();
        traces.push((name, t));
    }
    let report = CaseReport { case: case.name().to_string(), notes: out.notes, checks: out.reports, traces, wall: start.elapsed() };
    Ok(CaseOutcome { report, trajectory: traj })
}

/// File name of a trace: `trivial` → `H_triv.csv`, `P:dt` → `H_P_dt.csv`.
pub fn trace_file_name(spec: &str) -> String {
    let short = match spec {
        "trivial" => "triv".to_string(),
        "mass" => "M".to_string(),
        "energy" => "E".to_string(),
        "probability" => "P".to_string(),
        "normal" => "A".to_string(),
        other => other
            .split(|c: char| !c.is_ascii_alphanumeric())
            .filter(|w| !w.is_empty())
            .collect::<Vec<_>>()
            .join("_"),
    };
    if spec.starts_with("residual:") {
        format!("{short}.csv")
    } else {
        format!("H_{short}.csv")
    }
}

/// Solves, checks and exports one case into `out/<name>/`.
pub fn run_case(config: CaseConfig, out: &Path) -> Result<CaseReport> {
    let case = Case::from_config(config)?;
    let outcome = evaluate_case(&case)?;
    let dir = out.join(case.name());
    fs::create_dir_all(&dir)?;
    for (spec, t) in &outcome.report.traces {
        t.write_csv(&dir.join(trace_file_name(spec)))?;
    }
    let traj = &outcome.trajectory;
    let mut fields = Vec::new();
    for i in 0..traj.len() {
        let u = traj.field(i, 0)?;
        let name = if case.grid.dim == 1 { format!("u_{i:04}.csv") } else { format!("u_{i:04}.bin") };
        if case.grid.dim == 1 {
            write_csv_1d(&u, &dir.join(&name))?;
        } else {
            write_binary(&u, &dir.join(&name))?;
        }
        fields.push(serde_json::json!({ "t": traj.times[i], "file": name }));
    }
    let manifest = serde_json::json!({ "case": case.name(), "config": case.config, "fields": fields });
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    fs::write(dir.join("report.json"), report_json(&outcome.report))?;
    Ok(outcome.report)
}

pub fn report_json(report: &CaseReport) -> String {
    let checks: Vec<_> = report
        .checks
        .iter()
        .map(|c| {
            serde_json::json!({
                "case": report.case, "check": c.name, "kind": c.kind, "metric": c.metric,
                "tolerance": c.tolerance, "pass": c.pass, "details": c.details,
            })
        })
        .collect();
    let v = serde_json::json!({ "case": report.case, "pass": report.pass(), "notes": report.notes, "checks": checks });
    serde_json::to_string_pretty(&v).expect("report serializes")
}

/// Runs the declared checks of one case.
pub fn verify_case(config: CaseConfig) -> Result<CaseReport> {
    let case = Case::from_config(config)?;
    Ok(evaluate_case(&case)?.report)
}

/// Verifies every config on a pool of `jobs` threads, in input order.
pub fn verify_all(configs: Vec<CaseConfig>, jobs: usize) -> Result<Vec<(String, Result<CaseReport>)>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(pool.install(|| configs.into_par_iter().map(|c| (c.name.clone(), verify_case(c))).collect()))
}

/// Declared densities that are Lagrange densities.
pub fn lagrange_densities(case: &Case) -> Vec<String> {
    case.config
        .densities
        .iter()
        .filter(|spec| {
            parse_density(spec)
                .and_then(|d| d.build(&case.operator, &case.params))
                .is_ok_and(|d| d.kind == DensityKind::Lagrange)
        })
        .cloned()
        .collect()
}
