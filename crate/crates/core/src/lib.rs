//! Simulation and analysis of a stochastic mosquito population model with
//! Wolbachia invasion.
//!
//! - [`model`]: parameters, growth rates, threshold classification, Gamma
//!   stationary laws and deterministic equilibria.
//! - [`sde`]: seeded noise streams and the truncated Euler–Maruyama scheme.
//! - [`analysis`]: slope, time-average, occupation and K-S estimators.
//! - [`experiments`]: built-in scenarios with pass/fail verdicts.
//! - [`cli`]: the `wolbachia` command-line tool.

pub mod analysis;
pub mod cli;
pub mod experiments;
pub mod model;
pub mod sde;
mod special;

pub use model::{ModelParams, Species, State};
