use alloc::vec::Vec;

use super::bernoulli::{correlated_bernoulli, BinaryCorrelationSpec};
use super::cohort::{BaselineCohort, PotentialCohort};
use super::rng::SimRng;
use crate::error::{Error, Result};
use crate::numerics::{calibrate_intercept, expit, logistic_fit, mean_expit, LogisticModel};

/// Fresh draws of `Y₂⁽⁰⁰⁾` allowed when its logistic fit fails.
const MAX_REFITS: u32 = 10;

/// Effect targets of the resampling model, on the probability scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResampleScenario {
    pub theta: f64,
    pub lambda: f64,
    pub tau_tilde: f64,
    /// Target correlation between `Y₁⁽⁰⁾` and `Y₂⁽⁰⁰⁾`.
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResampleDgpConfig {
    pub cohort: BaselineCohort,
    pub scenario: ResampleScenario,
    /// Trial size drawn from the built cohort; unused when only building it.
    pub n: usize,
    pub seed: u64,
}

/// Calibrated intercepts of one built cohort and the forward-evaluated gaps
/// of each mean-expit target.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReport {
    /// Intercepts of the baseline fit and of `Y₁⁽¹⁾`.
    pub alpha0: f64,
    pub alpha1: f64,
    /// Intercepts of the period-2 fit on `Y₂⁽⁰⁰⁾` and of the three calibrated
    /// outcomes `Y₂⁽¹⁰⁾`, `Y₂⁽⁰¹⁾`, `Y₂⁽¹¹⁾`.
    pub alpha00: f64,
    pub alpha10: f64,
    pub alpha01: f64,
    pub alpha11: f64,
    /// Target offsets `θ, λ, θ−λ, θ` relative to the fitted means.
    pub target_offsets: [f64; 4],
    /// Offsets obtained by re-evaluating each calibrated model.
    pub achieved_offsets: [f64; 4],
    /// Redraws of `Y₂⁽⁰⁰⁾` after a failed fit.
    pub refits: u32,
}

impl CalibrationReport {
    pub fn max_error(&self) -> f64 {
        self.target_offsets
            .iter()
            .zip(&self.achieved_offsets)
            .map(|(t, a)| (t - a).abs())
            .fold(0.0, f64::max)
    }
}

/// The parts of the resampling model that do not depend on the random
/// stream: the baseline fit, the `Y₁⁽¹⁾` intercept and the correlation law.
#[derive(Debug, Clone, PartialEq)]
pub struct ResamplePipeline {
    cohort: BaselineCohort,
    scenario: ResampleScenario,
    baseline_model: LogisticModel,
    treated_model: LogisticModel,
    baseline_fitted_mean: f64,
    correlation: BinaryCorrelationSpec,
}

impl ResamplePipeline {
    /// Fit the baseline outcome model, calibrate the `Y₁⁽¹⁾` intercept so its
    /// mean fitted probability exceeds the baseline one by `θ`, and set up the
    /// `Y₂⁽⁰⁰⁾ | Y₁⁽⁰⁾` law with margins `p̄` and `p̄ + τ̃`.
    pub fn prepare(cohort: BaselineCohort, scenario: ResampleScenario) -> Result<Self> {
        let s = &scenario;
        if [s.theta, s.lambda, s.tau_tilde, s.rho].iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("resampling scenario must be finite"));
        }
        let x = cohort.covariates();
        let baseline_model = logistic_fit(x, cohort.y0())?;
        let baseline_fitted_mean = baseline_model.mean_prediction(x);
        let alpha1 =
            calibrate_intercept(&baseline_model.slopes, x, baseline_fitted_mean + scenario.theta)?;
        let treated_model = baseline_model.with_intercept(alpha1);
        let p1 = cohort.baseline_mean();
        let p2 = p1 + scenario.tau_tilde;
        if !(p2 > 0.0 && p2 < 1.0) {
            return Err(Error::TargetOutOfRange { target: p2 });
        }
        let correlation = BinaryCorrelationSpec::new(p1, p2, scenario.rho)?;
        Ok(Self { cohort, scenario, baseline_model, treated_model, baseline_fitted_mean, correlation })
    }

    pub fn cohort(&self) -> &BaselineCohort {
        &self.cohort
    }

    pub fn scenario(&self) -> &ResampleScenario {
        &self.scenario
    }

    pub fn baseline_model(&self) -> &LogisticModel {
        &self.baseline_model
    }

    pub fn treated_model(&self) -> &LogisticModel {
        &self.treated_model
    }

    pub fn correlation(&self) -> &BinaryCorrelationSpec {
        &self.correlation
    }

    /// One realisation of the six binary potential outcomes.
    ///
    /// Stream order: all `Y₁⁽¹⁾`, then `Y₂⁽⁰⁰⁾` (again after each failed
    /// fit), then `Y₂⁽¹⁰⁾`, `Y₂⁽⁰¹⁾`, `Y₂⁽¹¹⁾` subject by subject.
    /// `Y₁⁽⁰⁾` is the observed baseline outcome.
    pub fn build(&self, rng: &mut SimRng) -> Result<(PotentialCohort, CalibrationReport)> {
        let x = self.cohort.covariates();
        let n = self.cohort.len();
        let y0 = self.cohort.y0();
        let s = self.scenario;

        let y1_1: Vec<f64> = (0..n)
            .map(|i| bool_to_f64(rng.bernoulli(self.treated_model.predict(x.row(i)))))
            .collect();

        let mut refits = 0;
        let (y2_00, period2_model) = loop {
            let draw: Vec<f64> = y0
                .iter()
                .map(|&z| bool_to_f64(correlated_bernoulli(&self.correlation, z == 1.0, rng)))
                .collect();
            match logistic_fit(x, &draw) {
                Ok(model) => break (draw, model),
                Err(Error::NonConvergence { .. } | Error::InvalidInput(_)) if refits < MAX_REFITS => {
                    refits += 1
                }
                Err(e) => return Err(e),
            }
        };

        let slopes = &period2_model.slopes;
        let base2 = period2_model.mean_prediction(x);
        let target_offsets = [s.theta, s.lambda, s.theta - s.lambda, s.theta];
        let alpha10 = calibrate_intercept(slopes, x, base2 + s.lambda)?;
        let alpha01 = calibrate_intercept(slopes, x, base2 + s.theta - s.lambda)?;
        let alpha11 = calibrate_intercept(slopes, x, base2 + s.theta)?;
        let achieved_offsets = [
            mean_expit(self.treated_model.intercept, &self.treated_model.slopes, x)
                - self.baseline_fitted_mean,
            mean_expit(alpha10, slopes, x) - base2,
            mean_expit(alpha01, slopes, x) - base2,
            mean_expit(alpha11, slopes, x) - base2,
        ];

        let mut y2_10 = Vec::with_capacity(n);
        let mut y2_01 = Vec::with_capacity(n);
        let mut y2_11 = Vec::with_capacity(n);
        for i in 0..n {
            let eta = period2_model.linear_predictor(x.row(i)) - period2_model.intercept;
            y2_10.push(bool_to_f64(rng.bernoulli(expit(alpha10 + eta))));
            y2_01.push(bool_to_f64(rng.bernoulli(expit(alpha01 + eta))));
            y2_11.push(bool_to_f64(rng.bernoulli(expit(alpha11 + eta))));
        }

        let report = CalibrationReport {
            alpha0: self.baseline_model.intercept,
            alpha1: self.treated_model.intercept,
            alpha00: period2_model.intercept,
            alpha10,
            alpha01,
            alpha11,
            target_offsets,
            achieved_offsets,
            refits,
        };
        let cohort =
            PotentialCohort::new(x.clone(), y0.to_vec(), y1_1, y2_00, y2_10, y2_01, y2_11)?;
        Ok((cohort, report))
    }
}

#[inline]
fn bool_to_f64(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Build one cohort of binary potential outcomes from stream 0 of `config.seed`.
pub fn build_resampled_cohort(config: &ResampleDgpConfig) -> Result<(PotentialCohort, CalibrationReport)> {
    let pipeline = ResamplePipeline::prepare(config.cohort.clone(), config.scenario)?;
    pipeline.build(&mut SimRng::stream(config.seed, 0))
}
