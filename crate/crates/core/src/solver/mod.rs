//! Exact per-mode causal solutions of `A u = f`.
//!
//! At a fixed wavevector `k` the operator restricts to a polynomial `p(s)` in
//! `s ↔ ∂_t`. Every impulse `φ(x) δ^{(j)}(t)` then responds, for `t > 0`,
//! with `Σ_m r_m g^{(m)}(t)` where `s^j ≡ r(s) (mod p)` and `g` is the causal
//! Green's function; memory terms are convolved with `g` (Duhamel).

mod expm;
mod fractional;
pub mod quadrature;

use num_complex::Complex64;
use rayon::prelude::*;

pub use fractional::{duhamel, eliminate_half_derivative, gl_fractional_oracle, gl_weights};

use crate::error::{Error, Result};
use crate::field::{apply_spatial, Field, Grid, Space};
use crate::symbol::{DiffOp, FracKernel};
use expm::{expm, Mat};

const CZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `p(s) = a₀ + a₁ s + … + a_n s^n`, `a_n ≠ 0`, `n ≥ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModePoly {
    coeffs: Vec<Complex64>,
}

impl ModePoly {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last() == Some(&CZERO) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::NoDynamics);
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.degree()]
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(CZERO, |acc, c| acc * s + c)
    }

    /// Coefficients `r_0..r_{n−1}` of `s^j mod p(s)`.
    pub fn reduce_power(&self, j: usize) -> Vec<Complex64> {
        let n = self.degree();
        let mut r = vec![CZERO; n];
        if j < n {
            r[j] = Complex64::new(1.0, 0.0);
            return r;
        }
        r[n - 1] = Complex64::new(1.0, 0.0);
        let lead = self.leading();
        for _ in n - 1..j {
            // multiply by s, then eliminate s^n
            let top = r[n - 1];
            for m in (1..n).rev() {
                r[m] = r[m - 1];
            }
            r[0] = CZERO;
            let f = top / lead;
            for m in 0..n {
                r[m] -= f * self.coeffs[m];
            }
        }
        r
    }
}

/// Partial symbol evaluation in `k`: `a_m(k) = Σ_{α₀ = m} c_α (ik)^{α_spatial}`.
pub fn mode_polynomial(a: &DiffOp, k: &[f64]) -> Result<ModePoly> {
    let n = a.time_order();
    if n == 0 {
        return Err(Error::NoDynamics);
    }
    if n > 8 {
        return Err(Error::InvalidInput(format!("time order {n} exceeds the supported maximum of 8")));
    }
    let coeffs: Vec<Complex64> = (0..=n).map(|m| a.time_coefficient(m).spatial_symbol(k)).collect();
    if coeffs[n as usize] == CZERO {
        return Err(Error::DegenerateMode(k.to_vec()));
    }
    ModePoly::new(coeffs)
}

/// `(g, g′, …, g^{(n−1)})(t)` of the causal Green's function `p(d/dt) g = δ`.
///
/// Uses the exponential of the companion matrix after the diagonal similarity
/// `z_i = g^{(i)} / R^i`, with `R` a bound on the root magnitudes, so that the
/// scaled matrix has O(1) entries.
pub fn greens_state(p: &ModePoly, t: f64) -> Vec<Complex64> {
    let n = p.degree();
    if t < 0.0 {
        return vec![CZERO; n];
    }
    let lead = p.leading();
    if n == 1 {
        return vec![(-p.coeffs[0] / lead * t).exp() / lead];
    }
    let ratios: Vec<Complex64> = p.coeffs[..n].iter().map(|c| c / lead).collect();
    let radius = ratios
        .iter()
        .enumerate()
        .map(|(m, c)| c.norm().powf(1.0 / (n - m) as f64))
        .fold(1.0, f64::max);
    let mut c = Mat::zeros(n);
    for i in 0..n - 1 {
        c.set(i, i + 1, Complex64::new(radius * t, 0.0));
    }
    for m in 0..n {
        let v = -ratios[m] * radius.powi(m as i32 - n as i32 + 1) * t;
        c.set(n - 1, m, v);
    }
    let e = expm(&c);
    // initial state z(0+) = e_{n−1} / (a_n R^{n−1})
    let z0 = 1.0 / (lead * radius.powi(n as i32 - 1));
    (0..n).map(|i| e.at(i, n - 1) * z0 * radius.powi(i as i32)).collect()
}

/// Extends a state `(y, y′, …, y^{(n−1)})` of a homogeneous solution to
/// derivatives `0..=order` through `p(d/dt) y = 0`.
fn extend_homogeneous(p: &ModePoly, state: &[Complex64], order: usize) -> Vec<Complex64> {
    let n = p.degree();
    let mut out: Vec<Complex64> = state.to_vec();
    out.resize(n.max(order + 1), CZERO);
    for m in n..=order {
        let s: Complex64 = (0..n).map(|i| p.coeffs[i] * out[m - n + i]).sum();
        out[m] = -s / p.leading();
    }
    out.truncate(order + 1);
    out
}

/// Response at `t > 0` to a unit `δ^{(j)}` source.
pub fn delta_response(p: &ModePoly, j: usize, t: f64) -> Complex64 {
    if t <= 0.0 {
        return CZERO;
    }
    let g = greens_state(p, t);
    p.reduce_power(j).iter().zip(&g).map(|(r, gm)| r * gm).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Impulse {
    pub profile: Field,
    pub order: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Memory {
    pub profile: Field,
    pub kernel: FracKernel,
}

/// `f(x,t) = Σ profile_j(x) δ^{(m_j)}(t) + Σ profile_i(x) K_i(t)`, vanishing for `t < 0`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SourceSpec {
    pub impulses: Vec<Impulse>,
    pub memories: Vec<Memory>,
}

impl SourceSpec {
    pub fn impulse(profile: Field, order: u32) -> Self {
        Self { impulses: vec![Impulse { profile, order }], memories: Vec::new() }
    }

    pub fn grid(&self) -> Option<&Grid> {
        self.impulses.first().map(|i| &i.profile.grid).or_else(|| self.memories.first().map(|m| &m.profile.grid))
    }

    fn check_grid(&self, grid: &Grid) -> Result<()> {
        let all = self.impulses.iter().map(|i| &i.profile.grid).chain(self.memories.iter().map(|m| &m.profile.grid));
        for g in all {
            if g != grid {
                return Err(Error::GridMismatch);
            }
        }
        Ok(())
    }

    pub fn is_real(&self) -> bool {
        self.impulses.iter().all(|i| i.profile.real) && self.memories.iter().all(|m| m.profile.real)
    }

    /// True when the source vanishes for every `t > 0` (initial-data type).
    pub fn is_impulsive(&self) -> bool {
        self.memories.is_empty()
    }

    /// Spectrum of `∂_t^j f` at `t > 0` (only memory terms contribute).
    pub fn memory_spectrum(&self, j: u32, t: f64) -> Vec<Complex64> {
        let Some(grid) = self.grid() else { return Vec::new() };
        let mut out = vec![CZERO; grid.len()];
        for m in &self.memories {
            let w = m.kernel.derivative(j, t);
            if w == 0.0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(m.profile.to_spectral().values) {
                *o += v * w;
            }
        }
        out
    }
}

impl SourceSpec {
    /// Spectrum of `(L f)(·, t)` for `t > 0`, where impulses no longer contribute.
    pub fn apply(&self, op: &DiffOp, grid: &Grid, t: f64) -> Vec<Complex64> {
        let ks = grid.wavevectors();
        let mut out = vec![CZERO; grid.len()];
        if t <= 0.0 {
            return out;
        }
        for mem in &self.memories {
            let spec = mem.profile.to_spectral().values;
            for (m, part) in op.time_coefficients().iter().enumerate() {
                let w = mem.kernel.derivative(m as u32, t);
                if part.is_zero() || w == 0.0 {
                    continue;
                }
                for ((o, k), v) in out.iter_mut().zip(&ks).zip(&spec) {
                    *o += part.spatial_symbol(k) * v * w;
                }
            }
        }
        out
    }
}

/// Per sample time, per derivative order `0..=order`, the spectrum of `∂_t^m u`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub grid: Grid,
    pub times: Vec<f64>,
    pub order: usize,
    pub states: Vec<Vec<Vec<Complex64>>>,
    pub operator: DiffOp,
    pub source: SourceSpec,
    pub real: bool,
}

impl Trajectory {
    pub fn spectrum(&self, t_index: usize, m: usize) -> Result<&[Complex64]> {
        if m > self.order {
            return Err(Error::InsufficientOrder { required: m, available: self.order });
        }
        Ok(&self.states[t_index][m])
    }

    /// `∂_t^m u` at sample `t_index` in physical space.
    pub fn field(&self, t_index: usize, m: usize) -> Result<Field> {
        Ok(Field::from_spectrum(&self.grid, self.spectrum(t_index, m)?.to_vec(), self.real).to_physical())
    }

    /// Spectrum of `(L u)(·, t)` for an operator `L` with time derivatives
    /// up to the carried order.
    pub fn apply(&self, op: &DiffOp, t_index: usize) -> Result<Vec<Complex64>> {
        let need = op.time_order() as usize;
        if need > self.order {
            return Err(Error::InsufficientOrder { required: need, available: self.order });
        }
        let ks = self.grid.wavevectors();
        let mut out = vec![CZERO; self.grid.len()];
        for (m, part) in op.time_coefficients().iter().enumerate() {
            if part.is_zero() {
                continue;
            }
            for ((o, k), v) in out.iter_mut().zip(&ks).zip(&self.states[t_index][m]) {
                *o += part.spatial_symbol(k) * v;
            }
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Restricts to the samples whose times match `times` (within `1e-9` relative).
    pub fn subsample(&self, times: &[f64]) -> Result<Self> {
        let mut states = Vec::with_capacity(times.len());
        for &t in times {
            let i = self
                .times
                .iter()
                .position(|&s| (s - t).abs() <= 1e-9 * t.abs().max(1e-12))
                .ok_or_else(|| Error::InvalidInput(format!("sample time {t} not present")))?;
            states.push(self.states[i].clone());
        }
        Ok(Self { times: times.to_vec(), states, ..self.clone() })
    }

    /// `self + c·other`, state by state.
    pub fn axpy(&self, c: f64, other: &Self) -> Result<Self> {
        if self.grid != other.grid || self.times != other.times {
            return Err(Error::GridMismatch);
        }
        let order = self.order.min(other.order);
        let states = self
            .states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| {
                (0..=order)
                    .map(|m| a[m].iter().zip(&b[m]).map(|(x, y)| x + c * y).collect())
                    .collect()
            })
            .collect();
        Ok(Self { order, states, real: self.real && other.real, ..self.clone() })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    /// Highest time-derivative order to carry; defaults to `n − 1`.
    pub order: Option<usize>,
    /// Gauss–Legendre nodes for memory convolutions.
    pub quad_nodes: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { order: None, quad_nodes: 64 }
    }
}

pub fn solve_causal(a: &DiffOp, src: &SourceSpec, grid: &Grid, times: &[f64]) -> Result<Trajectory> {
    solve_causal_with(a, src, grid, times, &SolveOptions::default())
}

/// Solves `A u = f` mode by mode at the given sample times.
pub fn solve_causal_with(
    a: &DiffOp,
    src: &SourceSpec,
    grid: &Grid,
    times: &[f64],
    opts: &SolveOptions,
) -> Result<Trajectory> {
    if a.dim() != grid.dim {
        return Err(Error::DimensionMismatch(a.dim(), grid.dim));
    }
    src.check_grid(grid)?;
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("sample times must be strictly increasing".into()));
    }
    let n = a.time_order() as usize;
    let order = opts.order.unwrap_or(n.saturating_sub(1)).max(n.saturating_sub(1));
    let polys: Vec<ModePoly> = grid.wavevectors().iter().map(|k| mode_polynomial(a, k)).collect::<Result<_>>()?;

    let impulses: Vec<(usize, Vec<Complex64>)> =
        src.impulses.iter().map(|i| (i.order as usize, i.profile.to_spectral().values)).collect();
    let memories: Vec<(&FracKernel, Vec<Complex64>)> =
        src.memories.iter().map(|m| (&m.kernel, m.profile.to_spectral().values)).collect();
    let nodes = opts.quad_nodes;

    // per mode: [time][deriv]
    let per_mode: Vec<Vec<Vec<Complex64>>> = polys
        .par_iter()
        .enumerate()
        .map(|(mode, p)| {
            let reductions: Vec<Vec<Vec<Complex64>>> = impulses
                .iter()
                .map(|(j, _)| (0..=order).map(|m| p.reduce_power(j + m)).collect())
                .collect();
            times
                .iter()
                .map(|&t| {
                    let mut out = vec![CZERO; order + 1];
                    if t <= 0.0 {
                        return out;
                    }
                    if !impulses.is_empty() {
                        let g = greens_state(p, t);
                        for ((_, spec), red) in impulses.iter().zip(&reductions) {
                            let c = spec[mode];
                            if c == CZERO {
                                continue;
                            }
                            for (m, r) in red.iter().enumerate() {
                                let resp: Complex64 = r.iter().zip(&g).map(|(ri, gi)| ri * gi).sum();
                                out[m] += c * resp;
                            }
                        }
                    }
                    if !memories.is_empty() {
                        let mut mem = vec![CZERO; n];
                        let mut forcing = vec![CZERO; order + 1];
                        for (kernel, spec) in &memories {
                            let c = spec[mode];
                            if c == CZERO {
                                continue;
                            }
                            let conv = fractional::duhamel_state(p, kernel, t, nodes);
                            for (acc, v) in mem.iter_mut().zip(&conv) {
                                *acc += c * v;
                            }
                            for (j, f) in forcing.iter_mut().enumerate() {
                                *f += c * kernel.derivative(j as u32, t);
                            }
                        }
                        let full = extend_forced(p, &mem, &forcing, order);
                        for (o, v) in out.iter_mut().zip(full) {
                            *o += v;
                        }
                    }
                    out
                })
                .collect()
        })
        .collect();

    let states = (0..times.len())
        .map(|ti| (0..=order).map(|m| per_mode.iter().map(|pm| pm[ti][m]).collect()).collect())
        .collect();
    Ok(Trajectory {
        grid: grid.clone(),
        times: times.to_vec(),
        order,
        states,
        operator: a.clone(),
        source: src.clone(),
        real: a.is_real() && src.is_real(),
    })
}

/// Extends `(y, …, y^{(n−1)})` of `p(d/dt) y = F(t)` to higher orders using
/// `F, F′, …` at the same instant.
fn extend_forced(p: &ModePoly, state: &[Complex64], forcing: &[Complex64], order: usize) -> Vec<Complex64> {
    let n = p.degree();
    let mut out: Vec<Complex64> = state.to_vec();
    out.resize(n.max(order + 1), CZERO);
    for m in n..=order {
        let s: Complex64 = (0..n).map(|i| p.coeffs[i] * out[m - n + i]).sum();
        out[m] = (forcing[m - n] - s) / p.leading();
    }
    out.truncate(order + 1);
    out
}

/// Jump matching: `f = Σ_j c_j δ^{(j)}` with `c_j = Σ_{m=j+1}^{n} A_m u_{m−1−j}`,
/// where `A = Σ A_m ∂_t^m`.
pub fn source_from_ic(a: &DiffOp, ics: &[Field]) -> Result<SourceSpec> {
    let n = a.time_order() as usize;
    if n == 0 {
        return Err(Error::NoDynamics);
    }
    if ics.len() != n {
        return Err(Error::WrongIcCount { expected: n, got: ics.len() });
    }
    let grid = ics[0].grid.clone();
    if ics.iter().any(|f| f.grid != grid) {
        return Err(Error::GridMismatch);
    }
    let parts = a.time_coefficients();
    let mut impulses = Vec::with_capacity(n);
    for j in 0..n {
        let mut profile = Field::zeros(&grid);
        profile.real = true;
        for m in j + 1..=n {
            let term = apply_spatial(&parts[m], &ics[m - 1 - j])?;
            profile = profile.add(&term)?;
        }
        impulses.push(Impulse { profile: profile.to_physical(), order: j as u32 });
    }
    Ok(SourceSpec { impulses, memories: Vec::new() })
}

/// Initial data `(∂_t^m u)(·, 0+)`, `m < n`, modelled by an impulsive source.
pub fn ic_from_source(a: &DiffOp, src: &SourceSpec) -> Result<Vec<Field>> {
    if !src.memories.is_empty() {
        return Err(Error::MemoryTermsPresent);
    }
    let n = a.time_order() as usize;
    if n == 0 {
        return Err(Error::NoDynamics);
    }
    let grid = src.grid().cloned().ok_or_else(|| Error::InvalidInput("empty source".into()))?;
    src.check_grid(&grid)?;
    let spectra: Vec<(usize, Vec<Complex64>)> =
        src.impulses.iter().map(|i| (i.order as usize, i.profile.to_spectral().values)).collect();
    let mut ics = vec![vec![CZERO; grid.len()]; n];
    for (mode, k) in grid.wavevectors().iter().enumerate() {
        let p = mode_polynomial(a, k)?;
        let mut c = vec![CZERO; n];
        for (j, spec) in &spectra {
            let v = spec[mode];
            if v == CZERO {
                continue;
            }
            for (cm, r) in c.iter_mut().zip(p.reduce_power(*j)) {
                *cm += v * r;
            }
        }
        // c_j = Σ_{m=j+1}^{n} a_m u_{m−1−j}, solved from j = n−1 downwards
        let mut u = vec![CZERO; n];
        for j in (0..n).rev() {
            let mut s = c[j];
            for m in j + 1..n {
                s -= p.coeffs()[m] * u[m - 1 - j];
            }
            u[n - 1 - j] = s / p.leading();
        }
        for (i, ui) in u.into_iter().enumerate() {
            ics[i][mode] = ui;
        }
    }
    let real = a.is_real() && src.is_real();
    Ok(ics.into_iter().map(|v| Field::from_spectrum(&grid, v, real).to_physical()).collect())
}

/// Rewrites every impulse `φ δ^{(j)}` with `j ≥ n` as impulses of order `< n`
/// that give the same solution for `t > 0`, using `∂_t^n ≡ −(A − a_n ∂_t^n)/a_n`.
/// Needs a constant leading coefficient `a_n`.
pub fn reduce_impulses(a: &DiffOp, src: &SourceSpec) -> Result<SourceSpec> {
    let n = a.time_order() as usize;
    if n == 0 {
        return Err(Error::NoDynamics);
    }
    let parts = a.time_coefficients();
    let lead = &parts[n];
    if lead.total_order() != 0 || lead.is_zero() {
        return Err(Error::InvalidInput(format!("leading time coefficient {lead} is not a constant")));
    }
    let inv = lead.coeff(&crate::symbol::MultiIndex::ZERO).expect("constant term").recip();
    let mut impulses: Vec<Impulse> = Vec::new();
    for imp in &src.impulses {
        let j = imp.order as usize;
        if j < n {
            impulses.push(imp.clone());
            continue;
        }
        let dim = a.dim();
        let mut coeffs = vec![DiffOp::zero(dim); j + 1];
        coeffs[j] = DiffOp::identity(dim);
        for m in (n..=j).rev() {
            let c = std::mem::replace(&mut coeffs[m], DiffOp::zero(dim));
            if c.is_zero() {
                continue;
            }
            let c = c.scale(&inv);
            for i in 0..n {
                coeffs[m - n + i] = coeffs[m - n + i].sub(&c.mul(&parts[i])?)?;
            }
        }
        for (m, c) in coeffs.iter().enumerate().take(n) {
            if !c.is_zero() {
                impulses.push(Impulse { profile: apply_spatial(c, &imp.profile)?.to_physical(), order: m as u32 });
            }
        }
    }
    Ok(SourceSpec { impulses, memories: src.memories.clone() })
}

/// The initial data `u(·,0+), …, ∂_t^{order} u(·,0+)` of an impulsive source,
/// extended past `n − 1` through the homogeneous equation.
pub fn initial_derivatives(a: &DiffOp, src: &SourceSpec, order: usize) -> Result<Vec<Field>> {
    let ics = ic_from_source(a, src)?;
    let grid = ics[0].grid.clone();
    let spectra: Vec<Vec<Complex64>> = ics.iter().map(|f| f.to_spectral().values).collect();
    let real = ics.iter().all(|f| f.real);
    let mut out = vec![vec![CZERO; grid.len()]; order + 1];
    for (mode, k) in grid.wavevectors().iter().enumerate() {
        let p = mode_polynomial(a, k)?;
        let state: Vec<Complex64> = spectra.iter().map(|s| s[mode]).collect();
        for (m, v) in extend_homogeneous(&p, &state, order).into_iter().enumerate() {
            out[m][mode] = v;
        }
    }
    Ok(out.into_iter().map(|v| Field { space: Space::Spectral, ..Field::from_spectrum(&grid, v, real) }.to_physical()).collect())
}
