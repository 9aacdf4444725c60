//! Zero-inflated Poisson models for multi-edge networks.
//!
//! Plain Poisson network models (G(N,p), SBM, Chung-Lu configuration model
//! and the degree-corrected SBM) predict that, as interactions accumulate,
//! almost every node pair becomes connected. Empirical interaction networks
//! stay sparse instead. The zero-inflated variants put a structural-zero
//! mass `1 - q` on each pair:
//!
//! ```text
//! P(A_ij = n) = (1 - q_ij) [n = 0] + q_ij Pois(n; lambda_ij)
//! ```
//!
//! This crate fits both families by maximum likelihood, samples from them,
//! and compares them with observed data (edge-count histograms, chi-squared
//! statistics, spectral gap, clustering, path length, kurtosis).
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`.

pub mod blocks;
pub mod error;
pub mod json;
pub mod metrics;
pub mod models;
pub mod multigraph;
pub mod numerics;
mod scalar;

pub use error::{Error, ErrorKind, Result};

/// Library version, embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use multigraph::{BlockAssignment, MultiGraph, PairSpace, TemporalContactLog};
pub use scalar::Real;

pub type FittedModel64 = models::FittedModel<f64>;
pub type PairLaw64 = models::PairLaw<f64>;
pub type GraphSummary64 = multigraph::GraphSummary<f64>;
pub type CountHistogram64 = metrics::CountHistogram<f64>;
pub type CaptureReport64 = metrics::CaptureReport<f64>;
pub type TTestResult64 = numerics::TTestResult<f64>;
pub type OptimizerConfig64 = numerics::OptimizerConfig<f64>;
