//! Non-adiabatic dynamics of a single trapped ion.
//!
//! The ion's centre-of-mass motion is a quantum harmonic oscillator whose
//! frequency `w(t)` is manipulated in time. Everything observable about a
//! Gaussian state evolving under such a Hamiltonian follows from the two real
//! fundamental solutions `u`, `v` of `x'' + w^2 x = 0`. This crate integrates
//! those solutions and derives from them:
//!
//! - the non-adiabaticity triple `(Q*, Q1*, Q2*)` and covariance matrix
//!   ([`heisenberg`]);
//! - the classicality function and its critical non-adiabaticity threshold;
//! - the squeeze x rotation decomposition of the evolution operator
//!   ([`evolution_op`]);
//! - Floquet stability of the Mathieu protocol `w^2 = a - 2q cos(2 tau)`
//!   ([`stability`]).
//!
//! Internally all quantities are dimensionless (`hbar = m = 1`, frequencies in
//! units of the initial trap frequency); [`model::UnitSystem`] converts at the
//! boundary.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod evolution_op;
pub mod heisenberg;
pub mod integrator;
pub mod model;
pub mod simulation;
pub mod stability;

pub use error::{Error, Result};
pub use evolution_op::{EvolutionParams, SqueezedThermalParams};
pub use heisenberg::{CovarianceState, QTriple};
pub use integrator::{FundamentalState, Trajectory};
pub use model::{FrequencyProtocol, ThermalConfig, UnitSystem};
pub use stability::{Classification, MonodromyResult};
