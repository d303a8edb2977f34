//! Constant-coefficient differential operators as exact multivariate
//! polynomials in `(∂_t, ∂_x, ∂_y, ∂_z)`.
//!
//! The time indeterminate stands for `∂_t` itself; the Fourier convention
//! (`∂_t ↔ s`, `∂_{x_j} ↔ i k_j`) only enters at evaluation time.

mod coeff;
mod divide;
mod kernel;
mod parse;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

pub use coeff::Coeff;
pub use divide::Division;
pub use kernel::{frac_delta_kernel, recip_gamma, FracKernel};
pub use parse::Params;

use crate::error::{Error, Result};

/// Derivative orders `(α₀; α₁, α₂, α₃)`, time first.
///
/// The derived `Ord` is lexicographic with the time order most significant,
/// which is the term order used by [`DiffOp::exact_divide`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(pub [u32; 4]);

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex([0; 4]);

    pub fn time(k: u32) -> Self {
        MultiIndex([k, 0, 0, 0])
    }

    pub fn space(axis: usize, k: u32) -> Self {
        let mut a = [0; 4];
        a[axis + 1] = k;
        MultiIndex(a)
    }

    pub fn time_order(&self) -> u32 {
        self.0[0]
    }

    pub fn total_order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn spatial_order(&self) -> u32 {
        self.0[1] + self.0[2] + self.0[3]
    }

    fn add(&self, o: &Self) -> Self {
        let mut a = self.0;
        for (x, y) in a.iter_mut().zip(o.0) {
            *x += y;
        }
        MultiIndex(a)
    }

    fn checked_sub(&self, o: &Self) -> Option<Self> {
        let mut a = self.0;
        for (x, y) in a.iter_mut().zip(o.0) {
            *x = x.checked_sub(y)?;
        }
        Some(MultiIndex(a))
    }

    fn without_time(&self) -> Self {
        MultiIndex([0, self.0[1], self.0[2], self.0[3]])
    }
}

/// A linear constant-coefficient operator `Σ c_α ∂^α` in canonical form:
/// merged terms, no stored zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiffOp {
    terms: BTreeMap<MultiIndex, Coeff>,
    dim: usize,
}

fn check_dim(dim: usize) -> Result<()> {
    match dim {
        1 | 3 => Ok(()),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

impl DiffOp {
    pub fn zero(dim: usize) -> Self {
        Self { terms: BTreeMap::new(), dim }
    }

    pub fn monomial(dim: usize, index: MultiIndex, c: Coeff) -> Self {
        let mut op = Self::zero(dim);
        if !c.is_zero() {
            op.terms.insert(index, c);
        }
        op
    }

    pub fn identity(dim: usize) -> Self {
        Self::monomial(dim, MultiIndex::ZERO, Coeff::one())
    }

    pub fn scalar(dim: usize, c: Coeff) -> Self {
        Self::monomial(dim, MultiIndex::ZERO, c)
    }

    /// `∂_t^k`
    pub fn dt(dim: usize, k: u32) -> Self {
        Self::monomial(dim, MultiIndex::time(k), Coeff::one())
    }

    /// `∂_{x_axis}^k`, axis 0-based.
    pub fn dx(dim: usize, axis: usize, k: u32) -> Self {
        assert!(axis < dim, "axis {axis} out of range for dimension {dim}");
        Self::monomial(dim, MultiIndex::space(axis, k), Coeff::one())
    }

    pub fn laplacian(dim: usize) -> Self {
        (0..dim).fold(Self::zero(dim), |acc, ax| acc.add_unchecked(&Self::dx(dim, ax, 2)))
    }

    /// `∂_μ∂^μ = −∂_t² + Δ` with `c = 1`.
    pub fn dalembertian(dim: usize) -> Self {
        Self::laplacian(dim).add_unchecked(&Self::dt(dim, 2).neg())
    }

    /// Builds an operator from explicit terms, pruning zeros and merging duplicates.
    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (MultiIndex, Coeff)>) -> Result<Self> {
        check_dim(dim)?;
        let mut op = Self::zero(dim);
        for (idx, c) in terms {
            if (dim..3).any(|ax| idx.0[ax + 1] != 0) {
                return Err(Error::InvalidInput(format!("index {idx:?} uses an axis beyond dimension {dim}")));
            }
            op.accumulate(idx, c);
        }
        Ok(op)
    }

    fn accumulate(&mut self, idx: MultiIndex, c: Coeff) {
        if c.is_zero() {
            return;
        }
        let merged = match self.terms.remove(&idx) {
            Some(old) => &old + &c,
            None => c,
        };
        if !merged.is_zero() {
            self.terms.insert(idx, merged);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &Coeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, idx: &MultiIndex) -> Option<&Coeff> {
        self.terms.get(idx)
    }

    pub fn leading_term(&self) -> Option<(&MultiIndex, &Coeff)> {
        self.terms.iter().next_back()
    }

    /// Highest power of `∂_t` present (0 for the zero operator).
    pub fn time_order(&self) -> u32 {
        self.terms.keys().map(|m| m.time_order()).max().unwrap_or(0)
    }

    pub fn total_order(&self) -> u32 {
        self.terms.keys().map(|m| m.total_order()).max().unwrap_or(0)
    }

    pub fn is_time_free(&self) -> bool {
        self.time_order() == 0
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(Coeff::is_real)
    }

    fn same_dim(&self, o: &Self) -> Result<()> {
        if self.dim != o.dim {
            Err(Error::DimensionMismatch(self.dim, o.dim))
        } else {
            Ok(())
        }
    }

    fn add_unchecked(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (idx, c) in &o.terms {
            out.accumulate(*idx, c.clone());
        }
        out
    }

    fn mul_unchecked(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (ia, ca) in &self.terms {
            for (ib, cb) in &o.terms {
                out.accumulate(ia.add(ib), ca * cb);
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_dim(o)?;
        Ok(self.add_unchecked(o))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.same_dim(o)?;
        Ok(self.add_unchecked(&o.neg()))
    }

    /// Polynomial product; constant coefficients commute.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.same_dim(o)?;
        Ok(self.mul_unchecked(o))
    }

    pub fn neg(&self) -> Self {
        self.scale(&Coeff::from_int(-1))
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        let mut out = Self::zero(self.dim);
        for (idx, v) in &self.terms {
            out.accumulate(*idx, v * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(self.dim), |acc, _| acc.mul_unchecked(self))
    }

    /// Formal space-time adjoint: `c_α ↦ conj(c_α)·(−1)^{|α|}`.
    pub fn adjoint(&self) -> Self {
        self.map_coeffs(|idx, c| {
            let c = c.conj();
            if idx.total_order() % 2 == 1 { -c } else { c }
        })
    }

    /// Time reversal `A#`: the sign of every odd time-derivative term flips.
    pub fn time_reverse(&self) -> Self {
        self.map_coeffs(|idx, c| if idx.time_order() % 2 == 1 { -c.clone() } else { c.clone() })
    }

    /// `A*∘A`, the operator of the normal equation.
    pub fn normal_op(&self) -> Self {
        self.adjoint().mul_unchecked(self)
    }

    fn map_coeffs(&self, f: impl Fn(&MultiIndex, &Coeff) -> Coeff) -> Self {
        let mut out = Self::zero(self.dim);
        for (idx, c) in &self.terms {
            out.accumulate(*idx, f(idx, c));
        }
        out
    }

    /// Decides whether `self = q·divisor` for a polynomial operator `q`.
    pub fn exact_divide(&self, divisor: &Self) -> Result<Division> {
        self.same_dim(divisor)?;
        divide::exact_divide(self, divisor)
    }

    /// The time-free operator multiplying `∂_t^m`.
    pub fn time_coefficient(&self, m: u32) -> Self {
        let mut out = Self::zero(self.dim);
        for (idx, c) in &self.terms {
            if idx.time_order() == m {
                out.accumulate(idx.without_time(), c.clone());
            }
        }
        out
    }

    /// Splits into `[A_0, A_1, …, A_n]` with `A = Σ A_m ∂_t^m`.
    pub fn time_coefficients(&self) -> Vec<Self> {
        (0..=self.time_order()).map(|m| self.time_coefficient(m)).collect()
    }

    /// `Σ c_α s^{α₀} (i k₁)^{α₁} (i k₂)^{α₂} (i k₃)^{α₃}`.
    pub fn symbol_eval(&self, s: Complex64, k: &[f64]) -> Complex64 {
        assert_eq!(k.len(), self.dim, "wavevector length must equal the spatial dimension");
        let ik: Vec<Complex64> = k.iter().map(|&kj| Complex64::new(0.0, kj)).collect();
        self.terms
            .iter()
            .map(|(idx, c)| {
                let mut v = c.to_c64() * s.powu(idx.0[0]);
                for (ax, ikj) in ik.iter().enumerate() {
                    v *= ikj.powu(idx.0[ax + 1]);
                }
                v
            })
            .sum()
    }

    /// Exact version of [`symbol_eval`](Self::symbol_eval) over Gaussian rationals.
    pub fn symbol_eval_exact(&self, s: &Coeff, k: &[BigRational]) -> Coeff {
        assert_eq!(k.len(), self.dim, "wavevector length must equal the spatial dimension");
        let ik: Vec<Coeff> = k.iter().map(|kj| Coeff::new(BigRational::zero(), kj.clone())).collect();
        let pow = |base: &Coeff, e: u32| (0..e).fold(Coeff::one(), |acc, _| &acc * base);
        let mut total = Coeff::zero();
        for (idx, c) in &self.terms {
            let mut v = c * &pow(s, idx.0[0]);
            for (ax, ikj) in ik.iter().enumerate() {
                v = &v * &pow(ikj, idx.0[ax + 1]);
            }
            total = &total + &v;
        }
        total
    }

    /// Symbol of a time-free operator at wavevector `k`.
    pub fn spatial_symbol(&self, k: &[f64]) -> Complex64 {
        self.symbol_eval(Complex64::new(0.0, 0.0), k)
    }

    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        parse::parse(text, dim, &Params::new())
    }

    pub fn parse_with(text: &str, dim: usize, params: &Params) -> Result<Self> {
        parse::parse(text, dim, params)
    }
}

const AXIS_NAMES: [&str; 4] = ["dt", "dx", "dy", "dz"];

impl fmt::Display for DiffOp {
    /// Canonical literal, highest term first, e.g. `dt^2 + 1/2 dt - dx^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (idx, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.re < BigRational::zero() || (c.re.is_zero() && c.im < BigRational::zero());
            let mag = if negative { -c } else { c.clone() };
            match (n, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let factors: Vec<String> = idx
                .0
                .iter()
                .zip(AXIS_NAMES)
                .filter(|(e, _)| **e > 0)
                .map(|(e, name)| if *e == 1 { name.to_string() } else { format!("{name}^{e}") })
                .collect();
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag} ")?;
                }
                write!(f, "{}", factors.join(" "))?;
            }
        }
        Ok(())
    }
}
