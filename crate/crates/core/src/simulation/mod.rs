//! Seeded data generation and Monte Carlo power studies.
//!
//! Every random quantity is drawn from a [`SimRng`] stream identified by a
//! master seed and a stream number, so a replication's data depend only on
//! `(seed, replication index)` and never on scheduling.

mod bernoulli;
mod cohort;
mod gaussian;
mod resample;
mod rng;
mod study;

pub use bernoulli::{correlated_bernoulli, BinaryCorrelationSpec};
pub use cohort::{
    draw_trial, synthetic_cohort, BaselineCohort, PotentialCohort, SYNTHETIC_COHORT_SEED,
    SYNTHETIC_COHORT_SIZE,
};
pub use gaussian::{gaussian_dgp, gaussian_dgp_truths, GaussianDgpParams, GaussianEffects};
pub use resample::{
    build_resampled_cohort, CalibrationReport, ResampleDgpConfig, ResamplePipeline, ResampleScenario,
};
pub use rng::{derive_seed, SimRng};
pub use study::{run_power_study, run_power_study_serial, PowerStudyConfig, PowerStudyResult, StudyDgp, TestKind, TestSummary};
