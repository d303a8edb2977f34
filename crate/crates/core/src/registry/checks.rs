use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{rational, Case};
use crate::density::{combine, parse_density, DensityKind};
use crate::diagnostics::{
    action_stationarity, airy_higher_invariants, conservation_check, equivalence_check,
    identically_zero_check, monotonicity_check, rate_identity_check, residual_check, CheckKind, CheckReport,
    TestFunction, TraceSeries, FLOOR,
};
use crate::error::{Error, Result};
use crate::field::{apply_spatial, l2_norm, Field};
use crate::solver::{
    gl_fractional_oracle, ic_from_source, reduce_impulses, solve_causal_with, source_from_ic, SolveOptions, Trajectory,
};
use crate::symbol::{DiffOp, MultiIndex};

/// One declared check. Tolerances default to the kind's standard value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckConfig {
    Conserved {
        density: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
    MonotoneDecreasing {
        density: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
    /// `max_t |H(t)| ≤ tol · max_t ∫ |u|²`.
    IdenticallyZero {
        density: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
    /// `dH_E/dt = −d₀ ∫ u_t²` with `d₀` the named parameter; needs uniform samples.
    RateIdentity {
        param: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
    /// `‖op u − f‖ / ‖u‖`, with `f` subtracted only when `op` is the case operator.
    Residual {
        operator: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
    Stationary {
        density: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
    /// Stationarity of `λ₁ L₁ + λ₂ L₂`.
    CombinedStationary {
        densities: [String; 2],
        weights: [String; 2],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
    /// `∫ H = factor · ∫ H_ref` along the trajectory.
    OnShell {
        density: String,
        reference: String,
        factor: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
    AiryInvariants {
        n_max: u32,
    },
    /// Impulses of order ≥ n against their reduction to order < n.
    DeltaTrick {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
    /// The normal operator `A*A` with derived initial data against `A`.
    NormalEquivalence {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
    /// Half-order case against explicit Grünwald–Letnikov stepping.
    FractionalOracle {
        gl_dt: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
}

impl CheckConfig {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Conserved { .. } => "conserved",
            Self::MonotoneDecreasing { .. } => "monotone_decreasing",
            Self::IdenticallyZero { .. } => "identically_zero",
            Self::RateIdentity { .. } => "rate_identity",
            Self::Residual { .. } => "residual",
            Self::Stationary { .. } => "stationary",
            Self::CombinedStationary { .. } => "combined_stationary",
            Self::OnShell { .. } => "on_shell",
            Self::AiryInvariants { .. } => "airy_invariants",
            Self::DeltaTrick { .. } => "delta_trick",
            Self::NormalEquivalence { .. } => "normal_equivalence",
            Self::FractionalOracle { .. } => "fractional_oracle",
        }
    }

    /// Every referenced density must be declared.
    pub(super) fn validate(&self, declared: &[String]) -> Result<()> {
        let known = |d: &String| {
            if declared.contains(d) {
                Ok(())
            } else {
                Err(Error::Config(format!("{} check references undeclared density {d:?}", self.kind_name())))
            }
        };
        match self {
            Self::Conserved { density, .. }
            | Self::MonotoneDecreasing { density, .. }
            | Self::IdenticallyZero { density, .. }
            | Self::Stationary { density, .. } => known(density),
            Self::OnShell { density, reference, factor, .. } => {
                rational(factor)?;
                known(density)?;
                known(reference)
            }
            Self::CombinedStationary { densities, weights, .. } => {
                for w in weights {
                    rational(w)?;
                }
                densities.iter().try_for_each(known)
            }
            Self::FractionalOracle { gl_dt, .. } if !(*gl_dt > 0.0) => {
                Err(Error::Config("fractional oracle needs gl_dt > 0".into()))
            }
            _ => Ok(()),
        }
    }

    /// Overrides the tolerance of every check that has one.
    pub fn with_tolerance(&self, value: f64) -> Self {
        let mut c = self.clone();
        match &mut c {
            Self::Conserved { tol, .. }
            | Self::MonotoneDecreasing { tol, .. }
            | Self::IdenticallyZero { tol, .. }
            | Self::RateIdentity { tol, .. }
            | Self::Residual { tol, .. }
            | Self::Stationary { tol, .. }
            | Self::CombinedStationary { tol, .. }
            | Self::OnShell { tol, .. }
            | Self::DeltaTrick { tol, .. }
            | Self::NormalEquivalence { tol, .. }
            | Self::FractionalOracle { tol, .. } => *tol = Some(value),
            Self::AiryInvariants { .. } => {}
        }
        c
    }
}

/// What a check run produced besides its reports.
#[derive(Default)]
pub(super) struct Outputs {
    pub reports: Vec<CheckReport>,
    pub traces: Vec<TraceSeries>,
    pub notes: Vec<String>,
}

pub(super) struct Context<'a> {
    pub case: &'a Case,
    pub traj: &'a Trajectory,
    pub traces: &'a [(String, TraceSeries)],
    pub stationarity: Option<&'a (Trajectory, TestFunction)>,
}

impl Context<'_> {
    fn trace(&self, spec: &str) -> Result<&TraceSeries> {
        self.traces
            .iter()
            .find(|(s, _)| s == spec)
            .map(|(_, t)| t)
            .ok_or_else(|| Error::Config(format!("no trace for density {spec:?}")))
    }

    fn field_scale(&self) -> f64 {
        let vol = self.traj.grid.cell_volume() / self.traj.grid.len() as f64;
        self.traj
            .states
            .iter()
            .map(|s| s[0].iter().map(|v| v.norm_sqr()).sum::<f64>() * vol)
            .fold(0.0, f64::max)
    }

    fn stationary_setup(&self) -> Result<&(Trajectory, TestFunction)> {
        self.stationarity.ok_or_else(|| Error::Config("stationarity trajectory missing".into()))
    }
}

fn tol_or(tol: &Option<f64>, kind: CheckKind) -> f64 {
    tol.unwrap_or_else(|| kind.default_tolerance())
}

fn named(mut r: CheckReport, name: String) -> CheckReport {
    r.name = name;
    r
}

pub(super) fn run_check(check: &CheckConfig, cx: &Context<'_>, out: &mut Outputs) -> Result<()> {
    let case = cx.case;
    match check {
        CheckConfig::Conserved { density, tol } => {
            let r = conservation_check(cx.trace(density)?, tol_or(tol, CheckKind::Conserved))?;
            out.reports.push(named(r, format!("conserved:{density}")));
        }
        CheckConfig::MonotoneDecreasing { density, tol } => {
            let r = monotonicity_check(cx.trace(density)?, tol_or(tol, CheckKind::MonotoneDecreasing))?;
            out.reports.push(named(r, format!("monotone:{density}")));
        }
        CheckConfig::IdenticallyZero { density, tol } => {
            let r = identically_zero_check(cx.trace(density)?, cx.field_scale(), tol_or(tol, CheckKind::IdenticallyZero));
            out.reports.push(named(r, format!("zero:{density}")));
        }
        CheckConfig::RateIdentity { param, tol } => {
            let d0 = case.param(param)?;
            let tol = tol_or(tol, CheckKind::RateIdentity);
            let fine = rate_identity_check(cx.traj, d0, tol)?;
            let coarse_times: Vec<f64> = cx.traj.times.iter().skip(1).step_by(2).copied().collect();
            let coarse = rate_identity_check(&cx.traj.subsample(&coarse_times)?, d0, tol)?;
            let ratio = coarse.metric / fine.metric.max(FLOOR);
            let details = format!("error ratio {ratio:.3} on halving the step (second order gives 4)");
            out.reports.push(fine);
            out.reports.push(CheckReport::new("rate:refinement", CheckKind::RateIdentity, (ratio - 4.0).abs() / 4.0, 0.125, details));
        }
        CheckConfig::Residual { operator, tol } => {
            let op = DiffOp::parse_with(operator, case.grid.dim, &case.params)?;
            let tol = tol_or(tol, CheckKind::IdenticallyZero);
            let (report, mut trace) = residual(&op, case, cx.traj, tol)?;
            out.reports.push(named(report, format!("residual:{operator}")));
            trace.label = format!("residual:{operator}");
            out.traces.push(trace);
        }
        CheckConfig::Stationary { density, tol } => {
            let (traj, h) = cx.stationary_setup()?;
            let l = parse_density(density)?.build(&case.operator, &case.params)?;
            stationarity_pair(&l, traj, h, case, tol_or(tol, CheckKind::Stationary), density, out)?;
        }
        CheckConfig::CombinedStationary { densities, weights, tol } => {
            let (traj, h) = cx.stationary_setup()?;
            let l1 = parse_density(&densities[0])?.build(&case.operator, &case.params)?;
            let l2 = parse_density(&densities[1])?.build(&case.operator, &case.params)?;
            let (w1, w2): (BigRational, BigRational) = (rational(&weights[0])?, rational(&weights[1])?);
            let mut l = combine(&l1, &w1, &l2, &w2)?;
            l.label = format!("{}·{} + {}·{}", weights[0], densities[0], weights[1], densities[1]);
            let r = action_stationarity(&l, traj, traj, h, case.config.solver.stationarity.step)?;
            out.reports.push(CheckReport { tolerance: tol_or(tol, CheckKind::Stationary), pass: r.metric <= tol_or(tol, CheckKind::Stationary), ..r });
        }
        CheckConfig::OnShell { density, reference, factor, tol } => {
            let h = cx.trace(density)?;
            let r = cx.trace(reference)?;
            let f = rational(factor)?.to_f64().unwrap_or(f64::NAN);
            let worst = h.values.iter().zip(&r.values).map(|(a, b)| (a - f * b).abs()).fold(0.0, f64::max);
            let scale = r.values.iter().map(|b| (f * b).abs()).fold(0.0, f64::max);
            let details = format!("∫H = {factor}·∫H_ref at {} samples", h.values.len());
            out.reports.push(CheckReport::new(
                format!("on_shell:{density}={factor}·{reference}"),
                CheckKind::Equivalent,
                worst / scale.max(FLOOR),
                tol_or(tol, CheckKind::Equivalent),
                details,
            ));
        }
        CheckConfig::AiryInvariants { n_max } => {
            out.reports.extend(airy_higher_invariants(cx.traj, *n_max)?);
        }
        CheckConfig::DeltaTrick { tol } => delta_trick(case, cx.traj, tol_or(tol, CheckKind::Equivalent), out)?,
        CheckConfig::NormalEquivalence { tol } => normal_equivalence(case, cx.traj, tol_or(tol, CheckKind::Equivalent), out)?,
        CheckConfig::FractionalOracle { gl_dt, tol } => fractional_oracle(case, cx.traj, *gl_dt, tol_or(tol, CheckKind::Equivalent), out)?,
    }
    Ok(())
}

fn residual(op: &DiffOp, case: &Case, traj: &Trajectory, tol: f64) -> Result<(CheckReport, TraceSeries)> {
    if op == &case.operator {
        let r = residual_check(op, traj, tol)?;
        let values = vec![r.metric; traj.len()];
        return Ok((r, TraceSeries::new(traj.times.clone(), values, format!("residual:{op}"))?));
    }
    let mut values = Vec::with_capacity(traj.len());
    for i in 0..traj.len() {
        let v = traj.apply(op, i)?;
        let r: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let u: f64 = traj.states[i][0].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        values.push(r / u.max(FLOOR));
    }
    let metric = values.iter().copied().fold(0.0, f64::max);
    let trace = TraceSeries::new(traj.times.clone(), values, format!("residual:{op}"))?;
    Ok((CheckReport::new(format!("residual:{op}"), CheckKind::IdenticallyZero, metric, tol, "spectral L2 ratio per sample"), trace))
}

fn stationarity_pair(
    l: &crate::density::Density,
    traj: &Trajectory,
    h: &TestFunction,
    case: &Case,
    tol: f64,
    spec: &str,
    out: &mut Outputs,
) -> Result<()> {
    if l.kind != DensityKind::Lagrange {
        return Err(Error::Config(format!("stationarity of {spec} needs a Lagrange density")));
    }
    let step = case.config.solver.stationarity.step;
    let at = action_stationarity(l, traj, traj, h, step)?;
    out.reports.push(CheckReport::new(format!("stationary:{spec}"), CheckKind::Stationary, at.metric, tol, at.details));
    let off = h.perturb(traj, 1e-2)?;
    let away = action_stationarity(l, &off, traj, h, step)?;
    let details = format!("metric {:.3e} at the field displaced by 1e-2·h; reported as 1e-4/metric", away.metric);
    out.reports.push(CheckReport::new(format!("sensitivity:{spec}"), CheckKind::Stationary, 1e-4 / away.metric.max(FLOOR), 1.0, details));
    Ok(())
}

fn delta_trick(case: &Case, traj: &Trajectory, tol: f64, out: &mut Outputs) -> Result<()> {
    let a = &case.operator;
    let n = a.time_order();
    let reduced = reduce_impulses(a, &case.source)?;
    let opts = SolveOptions { order: Some(traj.order), quad_nodes: case.config.solver.quad_nodes };
    let direct = solve_causal_with(a, &reduced, &case.grid, &case.times, &opts)?;
    let mut r = equivalence_check(traj, &direct, tol)?;
    r.name = "delta_trick:equivalence".into();
    out.reports.push(r);
    let ics = ic_from_source(a, &reduced)?;
    let jumps: Vec<String> = ics.iter().enumerate().map(|(m, f)| format!("‖∂_t^{m}u(0+)‖={:.6e}", l2_norm(f))).collect();
    out.notes.push(format!("jump matching: {}", jumps.join(", ")));
    for imp in case.source.impulses.iter().filter(|i| i.order >= n) {
        let m = imp.order + 1 - n;
        out.notes.push(format!(
            "literal index reading of the order-{} impulse: ‖∂_t^{m}u(0+)‖={:.6e} (the profile itself)",
            imp.order,
            l2_norm(&imp.profile)
        ));
    }
    Ok(())
}

/// `u_{j+n} = −(Σ_{i<n} A_i u_{j+i}) / a_n` in physical space.
pub fn derived_initial_data(a: &DiffOp, ics: &[Field], count: usize) -> Result<Vec<Field>> {
    let n = a.time_order() as usize;
    if ics.len() != n {
        return Err(Error::WrongIcCount { expected: n, got: ics.len() });
    }
    let parts = a.time_coefficients();
    let lead = &parts[n];
    if lead.total_order() != 0 {
        return Err(Error::InvalidInput(format!("leading time coefficient {lead} is not a constant")));
    }
    let inv = lead.coeff(&MultiIndex::ZERO).ok_or(Error::ZeroDivisor)?.recip();
    let mut out: Vec<Field> = ics.iter().map(Field::to_physical).collect();
    while out.len() < count {
        let j = out.len() - n;
        let mut acc = Field::zeros(&out[0].grid);
        for (i, part) in parts.iter().take(n).enumerate() {
            acc = acc.add(&apply_spatial(&part.scale(&inv).neg(), &out[j + i])?.to_physical())?;
        }
        acc.real = out.iter().all(|f| f.real) && a.is_real();
        out.push(acc);
    }
    Ok(out)
}

fn normal_equivalence(case: &Case, traj: &Trajectory, tol: f64, out: &mut Outputs) -> Result<()> {
    let a = &case.operator;
    let n = a.time_order() as usize;
    let normal = a.normal_op();
    let ics = ic_from_source(a, &case.source)?;
    let all = derived_initial_data(a, &ics, 2 * n)?;
    let src = source_from_ic(&normal, &all)?;
    let opts = SolveOptions { order: Some(0), quad_nodes: case.config.solver.quad_nodes };
    let high = solve_causal_with(&normal, &src, &case.grid, &case.times, &opts)?;
    let mut r = equivalence_check(traj, &high, tol)?;
    r.name = format!("normal:order{}_vs_order{n}", 2 * n);
    r.details = format!("{}; derived data u_{n}..u_{}", r.details, 2 * n - 1);
    out.reports.push(r);
    let deep = solve_causal_with(a, &case.source, &case.grid, &case.times, &SolveOptions { order: Some(2 * n), ..opts })?;
    let mut res = residual_check(&normal, &deep, tol)?;
    res.name = format!("normal:residual_order{}", 2 * n);
    out.reports.push(res);
    out.notes.push(format!("normal operator {normal}"));
    Ok(())
}

fn fractional_oracle(case: &Case, traj: &Trajectory, gl_dt: f64, tol: f64, out: &mut Outputs) -> Result<()> {
    let b = case.half_order.as_ref().ok_or_else(|| Error::Config("fractional oracle needs a half-order case".into()))?;
    let phi = case.config.source.ics[0].build(&case.grid, &case.params)?;
    let half = BigRational::new(1.into(), 2.into());
    let t_max = case.config.time.t_max;
    let mut errors = Vec::new();
    for dt in [gl_dt, 2.0 * gl_dt] {
        let gl = gl_fractional_oracle(&half, b, &phi, dt, t_max)?;
        let gl = gl.subsample(&case.times)?;
        errors.push(equivalence_check(&gl, traj, tol)?);
    }
    let order = (errors[1].metric / errors[0].metric.max(FLOOR)).log2();
    let mut fine = errors.swap_remove(0);
    fine.name = "fractional:gl_oracle".into();
    fine.details = format!("Grünwald–Letnikov step {gl_dt:.1e}, {}", fine.details);
    out.reports.push(fine);
    out.reports.push(CheckReport::new(
        "fractional:gl_order",
        CheckKind::Equivalent,
        (order - 1.0).abs(),
        0.2,
        format!("observed order {order:.3} from steps {gl_dt:.1e} and {:.1e}", 2.0 * gl_dt),
    ));
    Ok(())
}
