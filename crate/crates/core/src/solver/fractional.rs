//! Memory sources: Duhamel convolution, the half-order elimination and a
//! Grünwald–Letnikov reference stepper.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;

use super::quadrature::gauss_legendre;
use super::{greens_state, Impulse, Memory, ModePoly, SourceSpec, Trajectory, CZERO};
use crate::error::{Error, Result};
use crate::field::{apply_spatial, Field};
use crate::symbol::{recip_gamma, DiffOp, FracKernel};

/// Breakpoints in `σ = √τ` on `[0, √t]`: dyadic in `t − τ` near `τ = t`,
/// capped at a width of a few decay/oscillation lengths `1/R`.
fn panels(p: &ModePoly, t: f64) -> Vec<f64> {
    let n = p.degree();
    let lead = p.leading();
    let rate = p.coeffs()[..n]
        .iter()
        .enumerate()
        .map(|(m, c)| (c / lead).norm().powf(1.0 / (n - m) as f64))
        .fold(0.0, f64::max);
    let mut dist = vec![0.0];
    if rate * t > 1.0 {
        let h = 1.0 / rate;
        let cap = 8.0 / rate;
        let mut d = h;
        while d < t {
            dist.push(d);
            d += (d).min(cap);
        }
    }
    dist.push(t);
    let mut sigma: Vec<f64> = dist.iter().map(|d| (t - d).max(0.0).sqrt()).collect();
    sigma.reverse();
    sigma
}

/// `∫₀ᵗ K(τ) (g, g′, …, g^{(n−1)})(t − τ) dτ`.
pub(crate) fn duhamel_state(p: &ModePoly, kernel: &FracKernel, t: f64, m_nodes: usize) -> Vec<Complex64> {
    let n = p.degree();
    let mut acc = vec![CZERO; n];
    if t <= 0.0 || kernel.scale == 0.0 {
        return acc;
    }
    let alpha = kernel.alpha_f64();
    let pre = 2.0 * kernel.scale * recip_gamma(alpha);
    let (x, w) = gauss_legendre(m_nodes.max(8));
    for edge in panels(p, t).windows(2) {
        let (a, b) = (edge[0], edge[1]);
        let half = 0.5 * (b - a);
        for (xi, wi) in x.iter().zip(&w) {
            let sigma = a + half * (xi + 1.0);
            let weight = wi * half * pre * sigma.powf(2.0 * alpha - 1.0);
            let g = greens_state(p, t - sigma * sigma);
            for (o, gi) in acc.iter_mut().zip(g) {
                *o += weight * gi;
            }
        }
    }
    acc
}

/// `∫₀ᵗ g(t − τ) K(τ) dτ` for the causal Green's function `g` of `p`.
pub fn duhamel(p: &ModePoly, kernel: &FracKernel, t: f64, m_nodes: usize) -> Complex64 {
    duhamel_state(p, kernel, t, m_nodes)[0]
}

/// Rewrites `∂_t^{1/2} u + B u = φ ∂_t^{−1/2} δ` as
/// `(∂_t − B²) u = φ δ − (Bφ) t^{−1/2}/√π`.
pub fn eliminate_half_derivative(b: &DiffOp, phi: &Field) -> Result<(DiffOp, SourceSpec)> {
    if !b.is_time_free() {
        return Err(Error::TimeDerivativeInSpatialOp);
    }
    if b.dim() != phi.grid.dim {
        return Err(Error::DimensionMismatch(b.dim(), phi.grid.dim));
    }
    let op = DiffOp::dt(b.dim(), 1).sub(&b.mul(b)?)?;
    let mut src = SourceSpec { impulses: vec![Impulse { profile: phi.clone(), order: 0 }], memories: Vec::new() };
    if !b.is_zero() {
        let bphi = apply_spatial(b, phi)?;
        let half = BigRational::new(1.into(), 2.into());
        src.memories.push(Memory { profile: bphi, kernel: FracKernel::new(half, -1.0)? });
    }
    Ok((op, src))
}

/// `w_0 = 1`, `w_j = w_{j−1} (1 − (α+1)/j)`.
pub fn gl_weights(alpha: f64, count: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(count);
    let mut cur = 1.0;
    for j in 0..count {
        if j > 0 {
            cur *= 1.0 - (alpha + 1.0) / j as f64;
        }
        w.push(cur);
    }
    w
}

/// Grünwald–Letnikov stepping of `∂_t^α u + B u = φ t^{−α}/Γ(1−α)` (`φ δ` when
/// `α = 1`), mode by mode, at the times `dt, 2dt, …`. The forcing is absorbed
/// as `Σ_j w_j (u_{n−j} − u_0)` and `B` is taken implicitly.
pub fn gl_fractional_oracle(alpha: &BigRational, b: &DiffOp, phi: &Field, dt: f64, t_max: f64) -> Result<Trajectory> {
    if !alpha.is_positive() || *alpha > BigRational::one() {
        return Err(Error::InvalidInput(format!("order {alpha} outside (0, 1]")));
    }
    if !b.is_time_free() {
        return Err(Error::TimeDerivativeInSpatialOp);
    }
    if !(dt > 0.0 && dt <= 1e-3 * t_max) {
        return Err(Error::InvalidInput(format!("step {dt} too coarse for horizon {t_max}")));
    }
    let grid = phi.grid.clone();
    let a = alpha.to_f64().unwrap_or(f64::NAN);
    let steps = (t_max / dt).round() as usize;
    let w = gl_weights(a, steps + 1);
    let dta = dt.powf(a);
    let spec = phi.to_spectral().values;
    let floor = 1e-14 * spec.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let symbols: Vec<Complex64> = grid.wavevectors().iter().map(|k| b.spatial_symbol(k)).collect();

    let per_mode: Vec<Result<Vec<Complex64>>> = spec
        .par_iter()
        .zip(&symbols)
        .enumerate()
        .map(|(mode, (&phat, &bhat))| {
            let mut u = vec![CZERO; steps + 1];
            if phat.norm() <= floor {
                return Ok(u);
            }
            u[0] = phat;
            // increments d_j = u_j − u_0 carry the t^{−α} forcing exactly at the discrete level
            let mut d = vec![CZERO; steps + 1];
            let denom = 1.0 + dta * bhat;
            for step in 1..=steps {
                let mut hist = CZERO;
                for j in 1..step {
                    hist += w[j] * d[step - j];
                }
                let next = (phat - hist) / denom;
                if !next.norm().is_finite() || next.norm() > 1e6 * phat.norm().max(1.0) {
                    return Err(Error::Unstable { mode, magnitude: next.norm() });
                }
                u[step] = next;
                d[step] = next - phat;
            }
            Ok(u)
        })
        .collect();
    let per_mode: Vec<Vec<Complex64>> = per_mode.into_iter().collect::<Result<_>>()?;

    let times: Vec<f64> = (1..=steps).map(|s| s as f64 * dt).collect();
    let states = (1..=steps).map(|s| vec![per_mode.iter().map(|m| m[s]).collect()]).collect();
    let dim = grid.dim;
    let source = if alpha.is_one() {
        SourceSpec::impulse(phi.clone(), 0)
    } else {
        let kernel = FracKernel::new(BigRational::one() - alpha, 1.0)?;
        SourceSpec { impulses: Vec::new(), memories: vec![Memory { profile: phi.clone(), kernel }] }
    };
    Ok(Trajectory {
        grid,
        times,
        order: 0,
        states,
        operator: DiffOp::dt(dim, 1).add(b)?,
        source,
        real: phi.real && b.is_real(),
    })
}
