//! Analytic inference: one-sided Z-tests, type-I error and power with
//! carry-over, sample sizes, relative efficiency and the carry-over
//! sensitivity analysis.
//!
//! Tests are one-sided in the "greater" direction throughout:
//! `H0: effect <= θ*` against `HA: effect > θ*`.

mod design;
mod power;
mod sensitivity;

pub use design::{
    expected_basic_estimand, potential_outcome_means, DesignParams, EffectScenario,
    PotentialOutcomeMeans, VarianceComponents,
};
pub use power::{
    carryover_breakeven, optimal_allocation, pitman_are, power_crossover, power_crossover_at,
    power_parallel, power_parallel_at, sample_size, type1_error_cr, DesignKind, SampleSize,
};
pub use sensitivity::{one_sided_test, sensitivity_test, tipping_point, SensitivitySpec, TestOutcome};
