use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::linalg::{dot, least_squares, Matrix};
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 100;
const GRADIENT_TOLERANCE: f64 = 1e-8;
const SEPARATION_MARGIN: f64 = 1e-10;
const MAX_HALVINGS: usize = 40;

#[inline]
pub fn expit(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

#[inline]
pub fn logit(p: f64) -> f64 {
    libm::log(p / (1.0 - p))
}

// log(1 + e^x) without overflow.
#[inline]
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + libm::log1p(libm::exp(-x))
    } else {
        libm::log1p(libm::exp(x))
    }
}

/// `expit(intercept + slopesᵀx)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub intercept: f64,
    pub slopes: Vec<f64>,
}

impl LogisticModel {
    #[inline]
    pub fn linear_predictor(&self, x: &[f64]) -> f64 {
        self.intercept + dot(&self.slopes, x)
    }

    #[inline]
    pub fn predict(&self, x: &[f64]) -> f64 {
        expit(self.linear_predictor(x))
    }

    /// Average fitted probability over the rows of `covariates`.
    pub fn mean_prediction(&self, covariates: &Matrix) -> f64 {
        let n = covariates.rows();
        (0..n).map(|i| self.predict(covariates.row(i))).sum::<f64>() / n as f64
    }

    /// Same slopes, different intercept.
    pub fn with_intercept(&self, intercept: f64) -> Self {
        Self { intercept, slopes: self.slopes.clone() }
    }
}

/// Outcome of an iterative solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    /// Final objective or root value, depending on the solver.
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Gradient norm (IRLS) or absolute target gap (calibration).
    pub residual: f64,
}

/// Maximum-likelihood logistic regression with an intercept, fitted by IRLS.
pub fn logistic_fit(covariates: &Matrix, outcomes: &[f64]) -> Result<LogisticModel> {
    logistic_fit_report(covariates, outcomes).map(|(model, _)| model)
}

/// [`logistic_fit`] plus the solver trace. `value` is the final log-likelihood.
pub fn logistic_fit_report(
    covariates: &Matrix,
    outcomes: &[f64],
) -> Result<(LogisticModel, SolveReport)> {
    let n = covariates.rows();
    let p = covariates.cols();
    if outcomes.len() != n {
        return Err(Error::invalid(format!(
            "{} outcomes for {n} covariate rows",
            outcomes.len()
        )));
    }
    if outcomes.iter().any(|&y| y != 0.0 && y != 1.0) {
        return Err(Error::invalid("logistic outcomes must be 0 or 1"));
    }
    let positives = outcomes.iter().filter(|&&y| y == 1.0).count();
    if positives == 0 || positives == n {
        return Err(Error::invalid("logistic outcomes are all equal"));
    }

    // Design with a leading intercept column.
    let mut design = Vec::with_capacity(n * (p + 1));
    for i in 0..n {
        design.push(1.0);
        design.extend_from_slice(covariates.row(i));
    }
    let design = Matrix::new(n, p + 1, design)?;

    let mut beta = vec![0.0; p + 1];
    beta[0] = logit(positives as f64 / n as f64);
    let mut eta = design.mul_vec(&beta);
    let mut loglik = log_likelihood(&eta, outcomes);

    let mut weighted = Matrix::zeros(n, p + 1);
    let mut working = vec![0.0; n];
    for iteration in 0..=MAX_ITERATIONS {
        let probs: Vec<f64> = eta.iter().map(|&e| expit(e)).collect();
        if probs.iter().any(|&q| q < SEPARATION_MARGIN || q > 1.0 - SEPARATION_MARGIN) {
            return Err(Error::NonConvergence {
                iterations: iteration,
                detail: "fitted probabilities reached 0 or 1 (separation)".into(),
            });
        }
        let mut gradient = vec![0.0; p + 1];
        for i in 0..n {
            let r = outcomes[i] - probs[i];
            for (g, x) in gradient.iter_mut().zip(design.row(i)) {
                *g += r * x;
            }
        }
        let gnorm = libm::sqrt(dot(&gradient, &gradient));
        if gnorm <= GRADIENT_TOLERANCE {
            let model = LogisticModel { intercept: beta[0], slopes: beta[1..].to_vec() };
            let report = SolveReport {
                value: loglik,
                iterations: iteration,
                converged: true,
                residual: gnorm,
            };
            return Ok((model, report));
        }
        if iteration == MAX_ITERATIONS {
            break;
        }

        // Newton step as a weighted least-squares problem.
        for i in 0..n {
            let w = probs[i] * (1.0 - probs[i]);
            let sw = libm::sqrt(w);
            for (j, x) in design.row(i).iter().enumerate() {
                weighted.set(i, j, sw * x);
            }
            working[i] = (outcomes[i] - probs[i]) / sw;
        }
        let step = least_squares(&weighted, &working)?;

        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = beta.iter().zip(&step).map(|(b, s)| b + scale * s).collect();
            let trial_eta = design.mul_vec(&trial);
            let trial_loglik = log_likelihood(&trial_eta, outcomes);
            if trial_loglik >= loglik - 1e-12 * loglik.abs() {
                beta = trial;
                eta = trial_eta;
                loglik = trial_loglik;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            return Err(Error::NonConvergence {
                iterations: iteration + 1,
                detail: "step halving could not increase the likelihood".into(),
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS,
        detail: format!("gradient norm above {GRADIENT_TOLERANCE:e}"),
    })
}

fn log_likelihood(eta: &[f64], outcomes: &[f64]) -> f64 {
    eta.iter().zip(outcomes).map(|(&e, &y)| y * e - softplus(e)).sum()
}
