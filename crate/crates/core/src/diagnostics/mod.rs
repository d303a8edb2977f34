//! Verdicts on trajectories: conservation, monotone dissipation, rate
//! identities, residuals, action stationarity and equivalence.

mod stationarity;

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use stationarity::{action, action_stationarity, TestFunction};

use crate::density::{energy_density, evaluate_density, Density};
use crate::error::{Error, Result};
use crate::field::{integrate, Field};
use crate::solver::Trajectory;
use crate::symbol::DiffOp;

pub const TOL_CONSERVED: f64 = 1e-8;
pub const TOL_MONOTONE: f64 = 1e-10;
pub const TOL_RATE: f64 = 1e-4;
pub const TOL_STATIONARY: f64 = 1e-8;
pub const TOL_EQUIVALENT: f64 = 1e-8;
pub const FLOOR: f64 = 1e-30;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub label: String,
}

impl TraceSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidInput("trace times and values differ in length".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) || times.first().is_some_and(|t| *t <= 0.0) {
            return Err(Error::InvalidInput("trace times must be positive and increasing".into()));
        }
        Ok(Self { times, values, label: label.into() })
    }

    pub fn scale(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// CSV with header `t,<label>`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "t,{}", self.label)?;
        for (t, v) in self.times.iter().zip(&self.values) {
            writeln!(w, "{t:.16e},{v:.16e}")?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Conserved,
    MonotoneDecreasing,
    IdenticallyZero,
    RateIdentity,
    Stationary,
    Equivalent,
}

impl CheckKind {
    pub fn default_tolerance(self) -> f64 {
        match self {
            Self::Conserved => TOL_CONSERVED,
            Self::MonotoneDecreasing => TOL_MONOTONE,
            Self::IdenticallyZero => TOL_CONSERVED,
            Self::RateIdentity => TOL_RATE,
            Self::Stationary => TOL_STATIONARY,
            Self::Equivalent => TOL_EQUIVALENT,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub kind: CheckKind,
    pub metric: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub details: String,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, kind: CheckKind, metric: f64, tolerance: f64, details: impl Into<String>) -> Self {
        Self { name: name.into(), kind, metric, tolerance, pass: metric <= tolerance, details: details.into() }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {} [{:?}] metric={:.3e} tol={:.1e}", self.name, self.kind, self.metric, self.tolerance)?;
        if !self.details.is_empty() {
            write!(f, " ({})", self.details)?;
        }
        Ok(())
    }
}

/// `t ↦ ∫ H(u)(x, t) dx` over the samples of `traj`.
pub fn hamiltonian_trace(h: &Density, traj: &Trajectory) -> Result<TraceSeries> {
    let values = (0..traj.len()).map(|i| integrate(&evaluate_density(h, traj, i)?)).collect::<Result<_>>()?;
    TraceSeries::new(traj.times.clone(), values, h.label.clone())
}

fn need_samples(s: &TraceSeries) -> Result<()> {
    if s.values.len() < 3 {
        return Err(Error::InvalidInput(format!("{} needs at least 3 samples", s.label)));
    }
    Ok(())
}

/// `max_t |s(t) − s(t₁)| / |s(t₁)|`.
pub fn conservation_check(s: &TraceSeries, tol: f64) -> Result<CheckReport> {
    need_samples(s)?;
    let first = s.values[0];
    let drift = s.values.iter().fold(0.0f64, |m, v| m.max((v - first).abs()));
    let metric = drift / first.abs().max(FLOOR);
    Ok(CheckReport::new(s.label.clone(), CheckKind::Conserved, metric, tol, format!("initial value {first:.6e}")))
}

/// Largest positive step between consecutive samples, relative to `max |s|`.
pub fn monotonicity_check(s: &TraceSeries, tol: f64) -> Result<CheckReport> {
    need_samples(s)?;
    let rise = s.values.windows(2).fold(0.0f64, |m, w| m.max(w[1] - w[0]));
    let metric = rise / s.scale().max(FLOOR);
    let details = format!("from {:.6e} to {:.6e}", s.values[0], s.values[s.values.len() - 1]);
    Ok(CheckReport::new(s.label.clone(), CheckKind::MonotoneDecreasing, metric, tol, details))
}

/// `max |s| / scale`, where `scale` is the squared field scale of the trace.
pub fn identically_zero_check(s: &TraceSeries, scale: f64, tol: f64) -> CheckReport {
    let metric = s.scale() / scale.max(FLOOR);
    CheckReport::new(s.label.clone(), CheckKind::IdenticallyZero, metric, tol, format!("scale {scale:.6e}"))
}

fn uniform_step(times: &[f64]) -> Result<f64> {
    if times.len() < 3 {
        return Err(Error::InvalidInput("rate identity needs at least 3 samples".into()));
    }
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    if times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt) {
        return Err(Error::NonUniformTimes);
    }
    Ok(dt)
}

fn energy_trace(traj: &Trajectory) -> Result<TraceSeries> {
    hamiltonian_trace(&energy_density(traj.grid.dim), traj)
}

fn ut_squared(traj: &Trajectory, i: usize) -> Result<f64> {
    let ut = traj.field(i, 1)?;
    Ok(traj.grid.cell_volume() * ut.values.iter().map(|v| v.norm_sqr()).sum::<f64>())
}

/// Centered `dH_E/dt` against `−d₀ ∫ u_t² dx` at interior samples.
pub fn rate_identity_check(traj: &Trajectory, d0: f64, tol: f64) -> Result<CheckReport> {
    let dt = uniform_step(&traj.times)?;
    let h = energy_trace(traj)?;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 1..traj.len() - 1 {
        let rate = (h.values[i + 1] - h.values[i - 1]) / (2.0 * dt);
        let want = -d0 * ut_squared(traj, i)?;
        worst = worst.max((rate - want).abs());
        scale = scale.max(want.abs());
    }
    if d0 == 0.0 {
        scale = h.scale();
    }
    let metric = worst / scale.max(FLOOR);
    let details = format!("centered differences, dt={dt:.3e}, d0={d0}");
    Ok(CheckReport::new("rate:energy", CheckKind::RateIdentity, metric, tol, details))
}

/// `max_t ‖(A u − f)(·, t)‖ / ‖u(·, t)‖`, time derivatives from the state.
pub fn residual_check(a: &DiffOp, traj: &Trajectory, tol: f64) -> Result<CheckReport> {
    let mut metric: f64 = 0.0;
    for (i, &t) in traj.times.iter().enumerate() {
        if t <= 0.0 {
            continue;
        }
        let au = traj.apply(a, i)?;
        let f = traj.source.apply(&DiffOp::identity(traj.grid.dim), &traj.grid, t);
        let r: f64 = au.iter().zip(&f).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        let u: f64 = traj.states[i][0].iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        metric = metric.max(r / u.max(FLOOR));
    }
    Ok(CheckReport::new(format!("residual:{a}"), CheckKind::IdenticallyZero, metric, tol, "spectral L2 ratio"))
}

/// `max_t ‖u₁ − u₂‖ / max_t ‖u₁‖`.
pub fn equivalence_check(t1: &Trajectory, t2: &Trajectory, tol: f64) -> Result<CheckReport> {
    if t1.grid != t2.grid || t1.times.len() != t2.times.len() {
        return Err(Error::GridMismatch);
    }
    if t1.times.iter().zip(&t2.times).any(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(1.0)) {
        return Err(Error::GridMismatch);
    }
    let mut dist: f64 = 0.0;
    let mut norm: f64 = 0.0;
    for i in 0..t1.len() {
        let (a, b) = (&t1.states[i][0], &t2.states[i][0]);
        dist = dist.max(a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt());
        norm = norm.max(a.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt());
    }
    let metric = dist / norm.max(FLOOR);
    Ok(CheckReport::new("equivalence", CheckKind::Equivalent, metric, tol, format!("{} samples", t1.len())))
}

/// `∫ ∂_x^{3n} u dx = 0` and `∫ (∂_x^{3n} u)² dx` constant for `1 ≤ n ≤ n_max`;
/// `n_max = 0` gives mass conservation.
pub fn airy_higher_invariants(traj: &Trajectory, n_max: u32) -> Result<Vec<CheckReport>> {
    if traj.grid.dim != 1 {
        return Err(Error::UnsupportedDimension(traj.grid.dim));
    }
    if n_max == 0 {
        let mass = integrals(traj, &DiffOp::identity(1), false)?;
        return Ok(vec![conservation_check(&mass, TOL_CONSERVED)?]);
    }
    let mut out = Vec::new();
    for n in 1..=n_max {
        let d = DiffOp::dx(1, 0, 3 * n);
        let tail = spectral_tail(traj, &d);
        if tail > 1e-10 {
            return Err(Error::Unresolved { tail });
        }
        let linear = integrals(traj, &d, false)?;
        let abs_scale = integrals(traj, &d, true)?;
        let mut zero = identically_zero_check(&linear, abs_scale.scale(), 1e-12);
        zero.name = format!("airy:int_dx{}", 3 * n);
        out.push(zero);
        let quad = integrals_squared(traj, &d)?;
        let mut cons = conservation_check(&quad, TOL_CONSERVED)?;
        cons.name = format!("airy:int_dx{}_sq", 3 * n);
        out.push(cons);
    }
    Ok(out)
}

fn derivative_field(traj: &Trajectory, d: &DiffOp, i: usize) -> Result<Field> {
    Ok(Field::from_spectrum(&traj.grid, traj.apply(d, i)?, traj.real).to_physical())
}

fn integrals(traj: &Trajectory, d: &DiffOp, absolute: bool) -> Result<TraceSeries> {
    let vals = (0..traj.len())
        .map(|i| {
            let f = derivative_field(traj, d, i)?;
            Ok(if absolute {
                traj.grid.cell_volume() * f.values.iter().map(|v| v.norm()).sum::<f64>()
            } else {
                integrate(&f)?
            })
        })
        .collect::<Result<_>>()?;
    TraceSeries::new(traj.times.clone(), vals, format!("int({d})u"))
}

fn integrals_squared(traj: &Trajectory, d: &DiffOp) -> Result<TraceSeries> {
    let vals = (0..traj.len())
        .map(|i| {
            let f = derivative_field(traj, d, i)?;
            Ok(traj.grid.cell_volume() * f.values.iter().map(|v| v.norm_sqr()).sum::<f64>())
        })
        .collect::<Result<_>>()?;
    TraceSeries::new(traj.times.clone(), vals, format!("int(({d})u)^2"))
}

/// Fraction of `‖d u‖²` carried by the outer quarter of the resolved band.
fn spectral_tail(traj: &Trajectory, d: &DiffOp) -> f64 {
    let kmax = traj.grid.wavenumber_1d(traj.grid.n / 2);
    let ks = traj.grid.wavevectors();
    let mut tail: f64 = 0.0;
    for i in 0..traj.len() {
        let (mut total, mut outer) = (0.0, 0.0);
        for (k, v) in ks.iter().zip(&traj.states[i][0]) {
            let e = (d.spatial_symbol(k) * v).norm_sqr();
            total += e;
            if k[0].abs() > 0.75 * kmax.abs() {
                outer += e;
            }
        }
        tail = tail.max(outer / total.max(FLOOR));
    }
    tail
}

#[cfg(test)]
mod tests;
