//! Simulation and benchmarking toolkit for binary classification of
//! diffusion time series.
//!
//! The pipeline: [`models`] defines pairs of diffusions differing only in
//! drift; [`simulate`] generates labeled path datasets by Euler-Maruyama;
//! [`lrt`] scores paths by log-likelihood ratios (the optimal reference by
//! the Neyman-Pearson lemma); [`rocket`] is the trained baseline;
//! [`metrics`] turns scores into ROC/AUC/accuracy; [`analytic`] supplies
//! closed-form and Monte-Carlo ground truth for the Gaussian families;
//! [`bench`] orchestrates the case matrix and repeated runs; [`io`]
//! serializes datasets, scores, and reports.

pub mod analytic;
pub mod bench;
pub mod error;
pub mod io;
pub mod lrt;
pub mod metrics;
pub mod models;
pub mod rng;
pub mod rocket;
pub mod simulate;

pub use error::{Error, Result};

/// Version string recorded in manifests.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
