//! Density spec strings: `trivial`, `P:dt`, `normal`, `time_reversal`,
//! `dalembert`, `mass`, `probability`, `energy`, `higher:2:P:dt`,
//! `split+:dalembert`, `split-:dalembert`, `quad:dt`.

use std::fmt;

use super::{energy_density, higher_order_density, quad_density, make_named_density, split_hamiltonian, default_hamiltonian, Density, NamedDensity};
use crate::error::{Error, Result};
use crate::symbol::{DiffOp, Params};

#[derive(Clone, Debug, PartialEq)]
pub enum DensitySpec {
    Named(NamedDensity),
    P(String),
    Energy,
    Quad(String),
    Higher(u32, Box<DensitySpec>),
    SplitPlus(Box<DensitySpec>),
    SplitMinus(Box<DensitySpec>),
}

pub fn parse_density(text: &str) -> Result<DensitySpec> {
    let text = text.trim();
    let named = |k| Ok(DensitySpec::Named(k));
    match text {
        "trivial" => return named(NamedDensity::Trivial),
        "normal" => return named(NamedDensity::Normal),
        "time_reversal" => return named(NamedDensity::TimeReversal),
        "dalembert" => return named(NamedDensity::Dalembert),
        "mass" => return named(NamedDensity::Mass),
        "probability" => return named(NamedDensity::Probability),
        "energy" => return Ok(DensitySpec::Energy),
        _ => {}
    }
    if let Some(op) = text.strip_prefix("P:") {
        if op.trim().is_empty() {
            return Err(Error::Density("P: needs an operator".into()));
        }
        return Ok(DensitySpec::P(op.trim().to_string()));
    }
    if let Some(op) = text.strip_prefix("quad:") {
        if op.trim().is_empty() {
            return Err(Error::Density("quad: needs an operator".into()));
        }
        return Ok(DensitySpec::Quad(op.trim().to_string()));
    }
    if let Some(rest) = text.strip_prefix("higher:") {
        let (n, inner) = rest.split_once(':').ok_or_else(|| Error::Density(format!("bad density spec {text:?}")))?;
        let n: u32 = n.parse().map_err(|_| Error::Density(format!("bad order in {text:?}")))?;
        if n < 1 {
            return Err(Error::Density("higher order needs n ≥ 1".into()));
        }
        return Ok(DensitySpec::Higher(n, Box::new(parse_density(inner)?)));
    }
    if let Some(inner) = text.strip_prefix("split+:") {
        return Ok(DensitySpec::SplitPlus(Box::new(parse_density(inner)?)));
    }
    if let Some(inner) = text.strip_prefix("split-:") {
        return Ok(DensitySpec::SplitMinus(Box::new(parse_density(inner)?)));
    }
    Err(Error::Density(format!("unknown density {text:?}")))
}

impl DensitySpec {
    /// The density for the operator `a`; named kinds give Lagrange densities.
    pub fn build(&self, a: &DiffOp, params: &Params) -> Result<Density> {
        match self {
            Self::Named(k) => make_named_density(*k, a, None),
            Self::P(text) => {
                let p = DiffOp::parse_with(text, a.dim(), params)?;
                make_named_density(NamedDensity::PDensity, a, Some(&p))
            }
            Self::Energy => Ok(energy_density(a.dim())),
            Self::Quad(text) => Ok(quad_density(&DiffOp::parse_with(text, a.dim(), params)?, format!("quad:{text}"))),
            Self::Higher(n, inner) => higher_order_density(&default_hamiltonian(&inner.build(a, params)?)?, *n),
            Self::SplitPlus(inner) => Ok(split_hamiltonian(&inner.build(a, params)?)?.0),
            Self::SplitMinus(inner) => Ok(split_hamiltonian(&inner.build(a, params)?)?.1),
        }
    }

    /// The Hamiltonian density used for traces.
    pub fn hamiltonian(&self, a: &DiffOp, params: &Params) -> Result<Density> {
        default_hamiltonian(&self.build(a, params)?)
    }
}

impl fmt::Display for DensitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Named(k) => f.write_str(match k {
                NamedDensity::Trivial => "trivial",
                NamedDensity::PDensity => "P",
                NamedDensity::Normal => "normal",
                NamedDensity::TimeReversal => "time_reversal",
                NamedDensity::Dalembert => "dalembert",
                NamedDensity::Mass => "mass",
                NamedDensity::Probability => "probability",
            }),
            Self::P(op) => write!(f, "P:{op}"),
            Self::Energy => f.write_str("energy"),
            Self::Quad(op) => write!(f, "quad:{op}"),
            Self::Higher(n, inner) => write!(f, "higher:{n}:{inner}"),
            Self::SplitPlus(inner) => write!(f, "split+:{inner}"),
            Self::SplitMinus(inner) => write!(f, "split-:{inner}"),
        }
    }
}
