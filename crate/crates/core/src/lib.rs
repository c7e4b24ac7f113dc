//! Design and analysis kernels for two-treatment, two-period crossover trials.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! - [`numerics`]: normal distribution functions, least squares, logistic
//!   regression by IRLS and intercept calibration.
//! - [`estimators`]: the basic crossover estimator, its alternative, the
//!   period-1 (parallel-group) estimator and ANHECOVA covariate adjustment.
//! - [`inference`]: one-sided Z-tests, type-I error, power, sample size,
//!   relative efficiency and the carry-over sensitivity analysis.
//! - [`simulation`]: seeded data-generating processes and the replication
//!   engine for empirical power studies.
//!
//! Enable the `parallel` feature to spread replications over a rayon pool.
//! Results do not depend on it.

#![no_std]

extern crate alloc;

#[cfg(any(feature = "std", test))]
extern crate std;

pub mod error;
pub mod estimators;
pub mod inference;
pub mod numerics;
pub mod simulation;

pub use error::{Error, Result};
pub use estimators::{
    compute_deltas, fit_adjustment, theta_cr, theta_cr_adj, theta_cr_alt, theta_pr, theta_pr_adj,
    AdjustmentFit, DeltaView, EstimateReport, Method, Response, Sequence, TrialDataset,
};
pub use inference::{DesignParams, EffectScenario, TestOutcome, VarianceComponents};
pub use numerics::{LogisticModel, Matrix};

/// Version of this crate, embedded in machine-readable reports.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
