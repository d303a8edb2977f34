use std::f64::consts::PI;

use num_complex::Complex64;

use super::{CheckKind, CheckReport, TOL_STATIONARY};
use crate::density::{evaluate_density_split, Density};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::solver::Trajectory;

/// `h(x, t) = profile(x) · sin⁸(π (t − t₀)/(t₁ − t₀))` on `[t₀, t₁]`, zero outside.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    pub profile: Field,
    pub t0: f64,
    pub t1: f64,
}

// sin⁸x = (35 − 56 cos 2x + 28 cos 4x − 8 cos 6x + cos 8x) / 128
const SIN8: [(f64, f64); 5] = [(0.0, 35.0), (2.0, -56.0), (4.0, 28.0), (6.0, -8.0), (8.0, 1.0)];

impl TestFunction {
    pub fn new(profile: Field, t0: f64, t1: f64) -> Result<Self> {
        if t1 <= t0 {
            return Err(Error::InvalidInput("test function needs t0 < t1".into()));
        }
        Ok(Self { profile: profile.to_physical(), t0, t1 })
    }

    /// `d^m/dt^m` of the time profile.
    pub fn time_derivative(&self, m: usize, t: f64) -> f64 {
        if t <= self.t0 || t >= self.t1 {
            return 0.0;
        }
        let w = PI / (self.t1 - self.t0);
        let x = w * (t - self.t0);
        SIN8.iter()
            .map(|&(j, c)| {
                let f = j * w;
                c * f.powi(m as i32) * (j * x + m as f64 * PI / 2.0).cos()
            })
            .sum::<f64>()
            / 128.0
    }

    fn check_support(&self, traj: &Trajectory, dt: f64) -> Result<()> {
        let margin = 3;
        let scale = self.profile.max_abs();
        let grid = &self.profile.grid;
        if (0..grid.len()).any(|i| grid.in_margin(i, margin) && self.profile.values[i].norm() > 1e-12 * scale) {
            return Err(Error::TestFieldOnBoundary);
        }
        let first = traj.times[0];
        let last = traj.times[traj.len() - 1];
        if self.t0 < first + margin as f64 * dt || self.t1 > last - margin as f64 * dt {
            return Err(Error::TestFieldOnBoundary);
        }
        Ok(())
    }

    /// `u + s h` with all carried time derivatives.
    pub fn perturb(&self, traj: &Trajectory, s: f64) -> Result<Trajectory> {
        if self.profile.grid != traj.grid {
            return Err(Error::GridMismatch);
        }
        let spec = self.profile.to_spectral().values;
        let mut out = traj.clone();
        for (state, &t) in out.states.iter_mut().zip(&traj.times) {
            for (m, values) in state.iter_mut().enumerate() {
                let c = s * self.time_derivative(m, t);
                if c == 0.0 {
                    continue;
                }
                for (v, h) in values.iter_mut().zip(&spec) {
                    *v += c * h;
                }
            }
        }
        out.real = traj.real && self.profile.real;
        Ok(out)
    }

    /// Space-time `L²` norm on the samples of `traj`.
    pub fn norm(&self, traj: &Trajectory, dt: f64) -> f64 {
        let spatial: f64 = self.profile.values.iter().map(Complex64::norm_sqr).sum::<f64>() * self.profile.grid.cell_volume();
        let temporal: f64 = traj.times.iter().map(|&t| self.time_derivative(0, t).powi(2)).sum::<f64>() * dt;
        (spatial * temporal).sqrt()
    }
}

fn uniform_step(times: &[f64]) -> Result<f64> {
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1).max(1) as f64;
    if times.len() < 2 || times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt) {
        return Err(Error::NonUniformTimes);
    }
    Ok(dt)
}

/// Discrete action `Δxᵈ Δt Σ_t Σ_x L` of the field `u` with `A⁻¹ f` from `solution`.
pub fn action(l: &Density, field: &Trajectory, solution: &Trajectory) -> Result<f64> {
    let dt = uniform_step(&field.times)?;
    let mut s = 0.0;
    for i in 0..field.len() {
        let v = evaluate_density_split(l, field, solution, i)?;
        s += v.values.iter().map(|x| x.re).sum::<f64>();
    }
    Ok(s * dt * field.grid.cell_volume())
}

/// `|S[u + s h] − S[u − s h]| / (2 s ‖h‖)` at `u = field`, with the source
/// side taken from `solution`.
pub fn action_stationarity(l: &Density, field: &Trajectory, solution: &Trajectory, h: &TestFunction, s: f64) -> Result<CheckReport> {
    let dt = uniform_step(&field.times)?;
    h.check_support(field, dt)?;
    let need = l.required_order();
    if need > field.order || need > solution.order {
        return Err(Error::InsufficientOrder { required: need, available: field.order.min(solution.order) });
    }
    let plus = action(l, &h.perturb(field, s)?, solution)?;
    let minus = action(l, &h.perturb(field, -s)?, solution)?;
    let metric = (plus - minus).abs() / (2.0 * s * h.norm(field, dt));
    let details = format!("s={s:.1e}, dt={dt:.1e}, {} samples", field.len());
    Ok(CheckReport::new(format!("stationary:{}", l.label), CheckKind::Stationary, metric, TOL_STATIONARY, details))
}
