//! Named cases, their JSON configs, and the `actionforge` command line.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::density::{parse_density, DensitySpec};
use crate::error::{Error, Result};
use crate::field::{apply_spatial, Field, Grid};
use crate::solver::{eliminate_half_derivative, source_from_ic, Impulse, Memory, SourceSpec};
use crate::symbol::{Coeff, DiffOp, FracKernel, Params};

mod builtin;
mod checks;
pub mod cli;
mod run;

pub use builtin::builtin_configs;
pub use checks::CheckConfig;
pub use run::{evaluate_case, lagrange_densities, report_json, run_case, trace_file_name, verify_all, verify_case, CaseOutcome, CaseReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub length: f64,
    pub dim: usize,
}

/// Samples at `t_max · i / samples`, `i = 1..=samples`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_max: f64,
    pub samples: usize,
}

/// `amplitude · exp(−|x − center|² / (2σ²))`, optionally hit by a spatial operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub sigma: f64,
    pub amplitude: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub apply: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpulseConfig {
    pub profile: ProfileConfig,
    pub order: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemoryConfig {
    pub profile: ProfileConfig,
    pub alpha: String,
    pub scale: f64,
}

/// Either initial data `u(0+), ∂_t u(0+), …` or an explicit source.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ics: Vec<ProfileConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub impulses: Vec<ImpulseConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub memories: Vec<MemoryConfig>,
}

/// Window and test function of the stationarity checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationarityConfig {
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
    pub sigma: f64,
    pub step: f64,
}

impl Default for StationarityConfig {
    fn default() -> Self {
        Self { t0: 0.2, t1: 0.8, dt: 1e-3, sigma: 0.3, step: 1e-4 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_nodes")]
    pub quad_nodes: usize,
    #[serde(default)]
    pub stationarity: StationarityConfig,
}

fn default_nodes() -> usize {
    64
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { quad_nodes: default_nodes(), stationarity: StationarityConfig::default() }
    }
}

/// `∂_t^{1/2} u + B u = φ ∂_t^{−1/2} δ`, solved through `(∂_t − B²) u = …`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FractionalConfig {
    pub b: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub operator: String,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    pub grid: GridConfig,
    pub time: TimeConfig,
    pub source: SourceConfig,
    #[serde(default)]
    pub densities: Vec<String>,
    #[serde(default)]
    pub checks: Vec<CheckConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fractional: Option<FractionalConfig>,
}

impl CaseConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Applies a JSON merge patch (objects merge, everything else replaces).
    pub fn patched(&self, patch: &serde_json::Value) -> Result<Self> {
        let mut base = serde_json::to_value(self).map_err(|e| Error::Config(e.to_string()))?;
        merge(&mut base, patch);
        serde_json::from_value(base).map_err(|e| Error::Config(e.to_string()))
    }
}

fn merge(base: &mut serde_json::Value, patch: &serde_json::Value) {
    use serde_json::Value;
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                if v.is_null() {
                    b.remove(k);
                } else {
                    merge(b.entry(k.clone()).or_insert(Value::Null), v);
                }
            }
        }
        (b, p) => *b = p.clone(),
    }
}

/// A validated case.
#[derive(Clone, Debug, PartialEq)]
pub struct Case {
    pub config: CaseConfig,
    pub operator: DiffOp,
    pub params: Params,
    pub grid: Grid,
    pub times: Vec<f64>,
    pub source: SourceSpec,
    pub densities: Vec<DensitySpec>,
    /// `B` of a half-order case.
    pub half_order: Option<DiffOp>,
}

fn rational(text: &str) -> Result<BigRational> {
    Coeff::parse_rational(text.trim()).ok_or_else(|| Error::Config(format!("not a rational: {text:?}")))
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

impl ProfileConfig {
    pub fn gaussian(sigma: f64, amplitude: f64) -> Self {
        Self { sigma, amplitude, center: None, apply: None }
    }

    pub fn build(&self, grid: &Grid, params: &Params) -> Result<Field> {
        if !(self.sigma > 0.0) {
            return Err(Error::Config(format!("profile width must be positive, got {}", self.sigma)));
        }
        if let Some(c) = &self.center {
            if c.len() != grid.dim {
                return Err(Error::Config(format!("profile center has {} coordinates on a {}-d grid", c.len(), grid.dim)));
            }
        }
        let g = Field::gaussian(grid, self.center.as_deref(), self.sigma, self.amplitude);
        match &self.apply {
            None => Ok(g),
            Some(op) => {
                let op = DiffOp::parse_with(op, grid.dim, params).map_err(config_err)?;
                Ok(apply_spatial(&op, &g).map_err(config_err)?.to_physical())
            }
        }
    }
}

impl Case {
    pub fn from_config(config: CaseConfig) -> Result<Self> {
        let params: Params = config.params.iter().map(|(k, v)| Ok((k.clone(), rational(v)?))).collect::<Result<_>>()?;
        let g = &config.grid;
        let grid = Grid::new(g.dim, g.n, g.length).map_err(config_err)?;
        let operator = DiffOp::parse_with(&config.operator, g.dim, &params).map_err(config_err)?;
        validate_params(&config.name, &params)?;
        let t = &config.time;
        if !(t.t_max > 0.0) || t.samples < 3 {
            return Err(Error::Config(format!("time needs t_max > 0 and at least 3 samples, got {} / {}", t.t_max, t.samples)));
        }
        let times = (1..=t.samples).map(|i| t.t_max * i as f64 / t.samples as f64).collect();
        let (source, half_order) = build_source(&config, &operator, &grid, &params)?;
        let densities = config.densities.iter().map(|d| parse_density(d).map_err(config_err)).collect::<Result<Vec<_>>>()?;
        for d in &densities {
            d.build(&operator, &params).map_err(config_err)?;
        }
        for c in &config.checks {
            c.validate(&config.densities)?;
        }
        Ok(Self { config, operator, params, grid, times, source, densities, half_order })
    }

    pub fn name(&self) -> &str {
        &self.config.name
    }

    pub fn param(&self, name: &str) -> Result<f64> {
        use num_traits::ToPrimitive;
        self.params
            .get(name)
            .and_then(|r| r.to_f64())
            .ok_or_else(|| Error::Config(format!("case {} has no parameter {name}", self.config.name)))
    }
}

fn validate_params(name: &str, params: &Params) -> Result<()> {
    for (key, rule) in [("tau0", "τ₀ > 0"), ("D", "D > 0"), ("c0", "c₀ > 0")] {
        if let Some(v) = params.get(key) {
            if !v.is_positive() {
                return Err(Error::Config(format!("case {name}: {rule} required, got {key} = {v}")));
            }
        }
    }
    if let Some(d0) = params.get("d0") {
        if d0.is_negative() {
            return Err(Error::Config(format!("case {name}: d0 must be non-negative")));
        }
    }
    Ok(())
}

fn build_source(config: &CaseConfig, a: &DiffOp, grid: &Grid, params: &Params) -> Result<(SourceSpec, Option<DiffOp>)> {
    let s = &config.source;
    let explicit = !s.impulses.is_empty() || !s.memories.is_empty();
    if explicit == !s.ics.is_empty() {
        return Err(Error::Config("source needs either ics or impulses/memories".into()));
    }
    if let Some(frac) = &config.fractional {
        let b = DiffOp::parse_with(&frac.b, grid.dim, params).map_err(config_err)?;
        if s.ics.len() != 1 {
            return Err(Error::Config("a half-order case takes exactly one initial profile".into()));
        }
        let phi = s.ics[0].build(grid, params)?;
        let (op, src) = eliminate_half_derivative(&b, &phi).map_err(config_err)?;
        if &op != a {
            return Err(Error::Config(format!("operator {a} differs from dt - B² = {op}")));
        }
        return Ok((src, Some(b)));
    }
    if !explicit {
        let ics = s.ics.iter().map(|p| p.build(grid, params)).collect::<Result<Vec<_>>>()?;
        return Ok((source_from_ic(a, &ics).map_err(config_err)?, None));
    }
    let impulses = s
        .impulses
        .iter()
        .map(|i| Ok(Impulse { profile: i.profile.build(grid, params)?, order: i.order }))
        .collect::<Result<Vec<_>>>()?;
    let memories = s
        .memories
        .iter()
        .map(|m| Ok(Memory { profile: m.profile.build(grid, params)?, kernel: FracKernel::new(rational(&m.alpha)?, m.scale).map_err(config_err)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok((SourceSpec { impulses, memories }, None))
}

/// The validated builtin cases.
pub fn builtin_cases() -> Vec<Case> {
    builtin_configs().into_iter().map(|c| Case::from_config(c).expect("builtin case is valid")).collect()
}

pub fn find_config(name: &str) -> Result<CaseConfig> {
    builtin_configs().into_iter().find(|c| c.name == name).ok_or_else(|| Error::UnknownCase(name.to_string()))
}

#[cfg(test)]
mod tests;
