//! Extended families of Lagrange and Hamiltonian densities for causal linear
//! evolution equations `A u = f` with `u|_{t<0} = 0`, `f|_{t<0} = 0`.
//!
//! The crate is organised bottom-up:
//!
//! - [`symbol`]: exact constant-coefficient operators (adjoint, time reversal,
//!   normal operator, exact division, symbols) and the fractional kernel.
//! - [`field`]: periodic grids, spectral transforms and quadrature.
//! - [`solver`]: exact per-mode causal solutions for impulse and memory
//!   sources, initial-data/source mappings and the half-order elimination.
//! - [`density`]: quadratic Lagrange densities, their Hamiltonians,
//!   higher-order Hamiltonians and pointwise evaluation.
//! - [`diagnostics`]: conservation, dissipation, residual, stationarity and
//!   equivalence checks.
//! - [`registry`]: the named cases and the `actionforge` command line.

pub mod density;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod registry;
pub mod solver;
pub mod symbol;

pub use error::{Error, Result};
