//! Quadratic Lagrange densities, their Hamiltonians and pointwise evaluation.
//!
//! A density is a sum of signed quadratic terms `± w |T u|²`, linear terms
//! `w L u` and source couplings `± w Re(conj(Q f) · F u)`. The operator chain
//! `Q` may contain the inverse of the case operator; `A⁻¹ f` is never formed
//! symbolically and evaluates to the solved trajectory.

mod spec;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

pub use spec::{parse_density, DensitySpec};

use crate::error::{Error, Result};
use crate::field::{Field, Space};
use crate::solver::Trajectory;
use crate::symbol::{Coeff, DiffOp, Division};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    Lagrange,
    Hamiltonian,
}

/// `sign · weight · |op u|²`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadTerm {
    pub op: DiffOp,
    pub sign: i8,
    pub weight: BigRational,
}

impl QuadTerm {
    pub fn new(op: DiffOp, sign: i8, weight: BigRational) -> Result<Self> {
        if !weight.is_positive() || !matches!(sign, 1 | -1) {
            return Err(Error::Density(format!("invalid quadratic term: sign {sign}, weight {weight}")));
        }
        Ok(Self { op, sign, weight })
    }

    fn half(op: DiffOp, sign: i8) -> Self {
        Self { op, sign, weight: half() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ChainOp {
    Op(DiffOp),
    InverseOf(DiffOp),
}

/// `sign · weight · Re(conj(Q f) · field_op u)` with `Q` the product of `op_chain`.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceCoupling {
    pub op_chain: Vec<ChainOp>,
    pub sign: i8,
    pub weight: BigRational,
    pub field_op: DiffOp,
}

/// `weight · Re(op u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearTerm {
    pub op: DiffOp,
    pub weight: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Density {
    pub kind: DensityKind,
    pub label: String,
    pub quads: Vec<QuadTerm>,
    pub couplings: Vec<SourceCoupling>,
    pub linear: Vec<LinearTerm>,
    pub legendre_ops: Vec<DiffOp>,
    pub complex_pair: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedDensity {
    Trivial,
    PDensity,
    Normal,
    TimeReversal,
    Dalembert,
    Mass,
    Probability,
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

fn one() -> BigRational {
    BigRational::one()
}

/// The coupling operator `P*P A⁻¹`, reduced to a differential operator when
/// `A` divides `P*P` exactly.
fn p_chain(a: &DiffOp, p: &DiffOp) -> Result<Vec<ChainOp>> {
    let n = p.normal_op();
    Ok(match n.exact_divide(a)? {
        Division::Exact(q) => vec![ChainOp::Op(q)],
        Division::NotDivisible => vec![ChainOp::Op(n), ChainOp::InverseOf(a.clone())],
    })
}

fn p_density(a: &DiffOp, p: &DiffOp, label: String) -> Result<Density> {
    if a.dim() != p.dim() {
        return Err(Error::DimensionMismatch(a.dim(), p.dim()));
    }
    let dim = a.dim();
    Ok(Density {
        kind: DensityKind::Lagrange,
        label,
        quads: vec![QuadTerm::half(p.clone(), 1)],
        couplings: vec![SourceCoupling { op_chain: p_chain(a, p)?, sign: -1, weight: one(), field_op: DiffOp::identity(dim) }],
        linear: Vec::new(),
        legendre_ops: Vec::new(),
        complex_pair: false,
    })
}

/// Builds one of the named densities of `A u = f`. `p` is required for the
/// P-density only.
pub fn make_named_density(kind: NamedDensity, a: &DiffOp, p: Option<&DiffOp>) -> Result<Density> {
    let dim = a.dim();
    match kind {
        NamedDensity::Trivial => p_density(a, &DiffOp::identity(dim), "trivial".into()),
        NamedDensity::PDensity => {
            let p = p.ok_or_else(|| Error::Density("P-density needs an operator P".into()))?;
            p_density(a, p, format!("P:{p}"))
        }
        NamedDensity::Normal => p_density(a, a, "normal".into()),
        NamedDensity::Probability => {
            let mut d = p_density(a, &DiffOp::identity(dim), "probability".into())?;
            d.complex_pair = true;
            Ok(d)
        }
        NamedDensity::TimeReversal => {
            if a.time_order() != 1 || a.time_coefficient(1) != DiffOp::identity(dim) {
                return Err(Error::Density(format!("time reversal needs A = dt + B with B time-free, got {a}")));
            }
            let b = a.sub(&DiffOp::dt(dim, 1))?;
            let adj = b.adjoint();
            let s0 = if adj == b {
                1
            } else if adj == b.neg() {
                -1
            } else {
                return Err(Error::Density(format!("adjoint of {b} is not ±{b}")));
            };
            Ok(Density {
                kind: DensityKind::Lagrange,
                label: "time_reversal".into(),
                quads: vec![QuadTerm::half(DiffOp::dt(dim, 1), 1), QuadTerm::half(b, s0)],
                couplings: vec![SourceCoupling {
                    op_chain: vec![ChainOp::Op(a.time_reverse())],
                    sign: -1,
                    weight: one(),
                    field_op: DiffOp::identity(dim),
                }],
                linear: Vec::new(),
                legendre_ops: Vec::new(),
                complex_pair: false,
            })
        }
        NamedDensity::Dalembert => {
            let mut quads = vec![QuadTerm::half(DiffOp::dt(dim, 1), 1)];
            quads.extend((0..dim).map(|j| QuadTerm::half(DiffOp::dx(dim, j, 1), -1)));
            Ok(Density {
                kind: DensityKind::Lagrange,
                label: "dalembert".into(),
                quads,
                couplings: vec![SourceCoupling {
                    op_chain: vec![ChainOp::Op(DiffOp::dalembertian(dim)), ChainOp::InverseOf(a.clone())],
                    sign: -1,
                    weight: one(),
                    field_op: DiffOp::identity(dim),
                }],
                linear: Vec::new(),
                legendre_ops: Vec::new(),
                complex_pair: false,
            })
        }
        NamedDensity::Mass => Ok(Density {
            kind: DensityKind::Hamiltonian,
            label: "mass".into(),
            quads: Vec::new(),
            couplings: Vec::new(),
            linear: vec![LinearTerm { op: DiffOp::identity(dim), weight: one() }],
            legendre_ops: Vec::new(),
            complex_pair: false,
        }),
    }
}

/// `½ Σ_μ (∂_μ u)²`, the wave energy.
pub fn energy_density(dim: usize) -> Density {
    let mut quads = vec![QuadTerm::half(DiffOp::dt(dim, 1), 1)];
    quads.extend((0..dim).map(|j| QuadTerm::half(DiffOp::dx(dim, j, 1), 1)));
    Density {
        kind: DensityKind::Hamiltonian,
        label: "energy".into(),
        quads,
        couplings: Vec::new(),
        linear: Vec::new(),
        legendre_ops: vec![DiffOp::dt(dim, 1)],
        complex_pair: false,
    }
}

/// The Hamiltonian `½ |op u|²`.
pub fn quad_density(op: &DiffOp, label: String) -> Density {
    Density {
        kind: DensityKind::Hamiltonian,
        label,
        quads: vec![QuadTerm::half(op.clone(), 1)],
        couplings: Vec::new(),
        linear: Vec::new(),
        legendre_ops: vec![op.clone()],
        complex_pair: false,
    }
}

fn transform(l: &Density, legendre: &[DiffOp]) -> Density {
    let flip = |op: &DiffOp| !legendre.contains(op);
    let quads = l
        .quads
        .iter()
        .map(|q| QuadTerm { sign: if flip(&q.op) { -q.sign } else { q.sign }, ..q.clone() })
        .collect();
    // linear terms in a Legendre variable cancel against their conjugate part
    let couplings = l
        .couplings
        .iter()
        .filter(|c| flip(&c.field_op))
        .map(|c| SourceCoupling { sign: -c.sign, ..c.clone() })
        .collect();
    let linear = l
        .linear
        .iter()
        .filter(|t| flip(&t.op))
        .map(|t| LinearTerm { op: t.op.clone(), weight: -t.weight.clone() })
        .collect();
    let kind = match l.kind {
        DensityKind::Lagrange => DensityKind::Hamiltonian,
        DensityKind::Hamiltonian => DensityKind::Lagrange,
    };
    Density { kind, label: l.label.clone(), quads, couplings, linear, legendre_ops: legendre.to_vec(), complex_pair: l.complex_pair }
}

/// `H = Σ_T (∂L/∂(Tu)) Tu − L` over the Legendre variables `T`.
///
/// Quadratic terms outside the Legendre set and every coupling change sign;
/// couplings linear in a Legendre variable drop out.
pub fn legendre_hamiltonian(l: &Density, legendre_ops: &[DiffOp]) -> Result<Density> {
    if legendre_ops.is_empty() {
        return Err(Error::Density("empty Legendre set".into()));
    }
    for op in legendre_ops {
        if !l.quads.iter().any(|q| &q.op == op) {
            return Err(Error::Density(format!("Legendre variable {op} is not a quadratic term")));
        }
    }
    Ok(transform(l, legendre_ops))
}

/// The Hamiltonian with the first quadratic term as the Legendre variable.
pub fn default_hamiltonian(l: &Density) -> Result<Density> {
    match l.kind {
        DensityKind::Hamiltonian => Ok(l.clone()),
        DensityKind::Lagrange => {
            let first = l.quads.first().ok_or_else(|| Error::Density(format!("{} has no quadratic term", l.label)))?;
            legendre_hamiltonian(l, &[first.op.clone()])
        }
    }
}

/// `(H₊, H₋)`: the positive and the negative quadratic terms as Legendre sets.
pub fn split_hamiltonian(l: &Density) -> Result<(Density, Density)> {
    if l.kind != DensityKind::Lagrange {
        return Err(Error::Density("split needs a Lagrange density".into()));
    }
    let pick = |s: i8| l.quads.iter().filter(|q| q.sign == s).map(|q| q.op.clone()).collect::<Vec<_>>();
    let mut plus = transform(l, &pick(1));
    let mut minus = transform(l, &pick(-1));
    plus.label = format!("{}+", l.label);
    minus.label = format!("{}-", l.label);
    Ok((plus, minus))
}

/// Substitutes `u ← ∂_t^{n−1} u`, `f ← ∂_t^{n−1} f`.
pub fn higher_order_density(h: &Density, n: u32) -> Result<Density> {
    if n < 1 {
        return Err(Error::Density("higher order needs n ≥ 1".into()));
    }
    if h.kind != DensityKind::Hamiltonian {
        return Err(Error::Density("higher order needs a Hamiltonian density".into()));
    }
    if n == 1 {
        return Ok(h.clone());
    }
    let dim = h.quads.first().map(|q| q.op.dim()).or_else(|| h.linear.first().map(|t| t.op.dim()));
    let Some(dim) = dim.or_else(|| h.couplings.first().map(|c| c.field_op.dim())) else {
        return Ok(h.clone());
    };
    let d = DiffOp::dt(dim, n - 1);
    let lift = |op: &DiffOp| d.mul(op);
    Ok(Density {
        kind: h.kind,
        label: format!("higher:{n}:{}", h.label),
        quads: h.quads.iter().map(|q| Ok(QuadTerm { op: lift(&q.op)?, ..q.clone() })).collect::<Result<_>>()?,
        couplings: h
            .couplings
            .iter()
            .map(|c| {
                let mut chain = vec![ChainOp::Op(d.clone())];
                chain.extend(c.op_chain.iter().cloned());
                Ok(SourceCoupling { op_chain: chain, field_op: lift(&c.field_op)?, ..c.clone() })
            })
            .collect::<Result<_>>()?,
        linear: h.linear.iter().map(|t| Ok(LinearTerm { op: lift(&t.op)?, weight: t.weight.clone() })).collect::<Result<_>>()?,
        legendre_ops: h.legendre_ops.iter().map(lift).collect::<Result<_>>()?,
        complex_pair: h.complex_pair,
    })
}

/// `c₁ L₁ + c₂ L₂`.
pub fn combine(l1: &Density, c1: &BigRational, l2: &Density, c2: &BigRational) -> Result<Density> {
    if l1.kind != l2.kind || l1.complex_pair != l2.complex_pair {
        return Err(Error::Density("cannot combine densities of different kinds".into()));
    }
    let mut out = Density {
        kind: l1.kind,
        label: format!("{c1}*{}+{c2}*{}", l1.label, l2.label),
        quads: Vec::new(),
        couplings: Vec::new(),
        linear: Vec::new(),
        legendre_ops: Vec::new(),
        complex_pair: l1.complex_pair,
    };
    for (d, c) in [(l1, c1), (l2, c2)] {
        if c.is_zero() {
            continue;
        }
        let s: i8 = if c.is_negative() { -1 } else { 1 };
        let mag = c.abs();
        out.quads.extend(d.quads.iter().map(|q| QuadTerm { sign: s * q.sign, weight: &q.weight * &mag, op: q.op.clone() }));
        out.couplings.extend(d.couplings.iter().map(|cp| SourceCoupling { sign: s * cp.sign, weight: &cp.weight * &mag, ..cp.clone() }));
        out.linear.extend(d.linear.iter().map(|t| LinearTerm { op: t.op.clone(), weight: &t.weight * c }));
        for op in &d.legendre_ops {
            if !out.legendre_ops.contains(op) {
                out.legendre_ops.push(op.clone());
            }
        }
    }
    Ok(out)
}

impl Density {
    /// Highest time-derivative order needed from the field and solution trajectories.
    pub fn required_order(&self) -> usize {
        let q = self.quads.iter().map(|q| q.op.time_order());
        let l = self.linear.iter().map(|t| t.op.time_order());
        let c = self.couplings.iter().flat_map(|c| {
            let chain: u32 = c
                .op_chain
                .iter()
                .map(|o| match o {
                    ChainOp::Op(d) => d.time_order(),
                    ChainOp::InverseOf(_) => 0,
                })
                .sum();
            [chain, c.field_op.time_order()]
        });
        q.chain(l).chain(c).max().unwrap_or(0) as usize
    }
}

fn coupling_spectrum(c: &SourceCoupling, solution: &Trajectory, t_index: usize) -> Result<Vec<Complex64>> {
    let dim = solution.grid.dim;
    let mut q = DiffOp::identity(dim);
    let mut inverse = None;
    for op in &c.op_chain {
        match op {
            ChainOp::Op(d) => q = q.mul(d)?,
            ChainOp::InverseOf(a) => {
                if inverse.is_some() {
                    return Err(Error::Density("more than one inverse in a coupling chain".into()));
                }
                inverse = Some(a);
            }
        }
    }
    match inverse {
        None => Ok(solution.source.apply(&q, &solution.grid, solution.times[t_index])),
        Some(a) if *a == solution.operator => solution.apply(&q, t_index),
        Some(a) => Err(Error::Density(format!("cannot invert {a}: the trajectory solves {}", solution.operator))),
    }
}

fn to_points(traj: &Trajectory, spectrum: Vec<Complex64>) -> Vec<Complex64> {
    Field::from_spectrum(&traj.grid, spectrum, false).to_physical().values
}

/// Pointwise density values with `u` from `field` and `A⁻¹ f`, `f` from `solution`.
pub fn evaluate_density_split(d: &Density, field: &Trajectory, solution: &Trajectory, t_index: usize) -> Result<Field> {
    if field.grid != solution.grid || field.times.get(t_index) != solution.times.get(t_index) {
        return Err(Error::GridMismatch);
    }
    let mut acc = vec![0.0; field.grid.len()];
    for q in &d.quads {
        let w = f64::from(q.sign) * q.weight.to_f64().unwrap_or(f64::NAN);
        for (a, v) in acc.iter_mut().zip(to_points(field, field.apply(&q.op, t_index)?)) {
            *a += w * v.norm_sqr();
        }
    }
    for t in &d.linear {
        let w = t.weight.to_f64().unwrap_or(f64::NAN);
        for (a, v) in acc.iter_mut().zip(to_points(field, field.apply(&t.op, t_index)?)) {
            *a += w * v.re;
        }
    }
    for c in &d.couplings {
        let w = f64::from(c.sign) * c.weight.to_f64().unwrap_or(f64::NAN);
        let qf = to_points(solution, coupling_spectrum(c, solution, t_index)?);
        let fu = to_points(field, field.apply(&c.field_op, t_index)?);
        for ((a, x), y) in acc.iter_mut().zip(qf).zip(fu) {
            *a += w * (x.conj() * y).re;
        }
    }
    Ok(Field {
        grid: field.grid.clone(),
        values: acc.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        space: Space::Physical,
        real: true,
    })
}

/// Pointwise density values on a solved trajectory at sample `t_index`.
pub fn evaluate_density(d: &Density, traj: &Trajectory, t_index: usize) -> Result<Field> {
    evaluate_density_split(d, traj, traj, t_index)
}

fn coeff_str(w: &BigRational) -> String {
    if w.is_one() {
        String::new()
    } else {
        format!("{} ", Coeff::real(w.clone()))
    }
}

impl std::fmt::Display for Density {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        for q in &self.quads {
            let s = if q.sign < 0 { "-" } else { "+" };
            parts.push(format!("{s} {}|({})u|^2", coeff_str(&q.weight), q.op));
        }
        for t in &self.linear {
            let s = if t.weight.is_negative() { "-" } else { "+" };
            parts.push(format!("{s} {}({})u", coeff_str(&t.weight.abs()), t.op));
        }
        for c in &self.couplings {
            let s = if c.sign < 0 { "-" } else { "+" };
            let chain: Vec<String> = c
                .op_chain
                .iter()
                .map(|o| match o {
                    ChainOp::Op(d) => format!("({d})"),
                    ChainOp::InverseOf(a) => format!("({a})^-1"),
                })
                .collect();
            parts.push(format!("{s} {}({} f)·({})u", coeff_str(&c.weight), chain.join(""), c.field_op));
        }
        let body = parts.join(" ");
        write!(f, "{}", body.strip_prefix("+ ").unwrap_or(&body))
    }
}

#[cfg(test)]
mod tests;
