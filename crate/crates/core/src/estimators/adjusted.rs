use alloc::format;
use alloc::vec::Vec;

use super::basic::{arm_summary, require_arms};
use super::{check_allocation, mean_and_variance, EstimateReport, Method, Sequence, TrialDataset};
use crate::error::{Error, Result};
use crate::numerics::{least_squares, Matrix};

/// Outcome regressed on covariates within each arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Response {
    /// Within-subject change `y1 - y2`.
    Delta,
    /// Period-1 outcome.
    Y1,
}

/// Arm-wise least-squares fit of a response on covariates.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjustmentFit {
    pub response: Response,
    /// Slopes per arm, indexed by [`Sequence::index`].
    pub beta_by_arm: [Vec<f64>; 2],
    /// Sample covariance of the covariates over all subjects.
    pub covariate_covariance: Matrix,
    /// Residual variances per arm, `(n_a - 1)` divisor.
    pub arm_residual_variances: [f64; 2],
    pub arm_response_means: [f64; 2],
    pub arm_covariate_means: [Vec<f64>; 2],
    pub covariate_mean: Vec<f64>,
    pub counts: [usize; 2],
}

impl AdjustmentFit {
    /// `β̂_aᵀ(X̄_a − X̄)`.
    pub fn correction(&self, arm: usize) -> f64 {
        self.beta_by_arm[arm]
            .iter()
            .zip(&self.arm_covariate_means[arm])
            .zip(&self.covariate_mean)
            .map(|((b, xa), x)| b * (xa - x))
            .sum()
    }

    /// `(β̂₁ − β̂₀)ᵀ Σ̂_X (β̂₁ − β̂₀)`.
    pub fn slope_gap_term(&self) -> f64 {
        let diff: Vec<f64> =
            self.beta_by_arm[1].iter().zip(&self.beta_by_arm[0]).map(|(a, b)| a - b).collect();
        self.covariate_covariance.quadratic_form(&diff)
    }
}

pub fn fit_adjustment(data: &TrialDataset, response: Response) -> Result<AdjustmentFit> {
    let p = data.covariate_dim();
    if p == 0 {
        return Err(Error::SingularCovariance(
            "covariate adjustment needs at least one covariate column".into(),
        ));
    }
    let counts = require_arms(data, 2)?;
    for (arm, &count) in counts.iter().enumerate() {
        if count <= p + 1 {
            return Err(Error::SingularCovariance(format!(
                "arm {arm} has {count} subjects for {p} covariates; need more than {}",
                p + 1
            )));
        }
    }

    let values: Vec<f64> = match response {
        Response::Delta => data.y1().iter().zip(data.y2()).map(|(a, b)| a - b).collect(),
        Response::Y1 => data.y1().to_vec(),
    };

    let mut beta_by_arm: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    let mut arm_residual_variances = [0.0; 2];
    let mut arm_response_means = [0.0; 2];
    let mut arm_covariate_means: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for sequence in [Sequence::ControlFirst, Sequence::TreatFirst] {
        let a = sequence.index();
        let rows = data.arm_indices(sequence);
        let x = data.covariates().select_rows(&rows);
        let x_mean = x.column_means();
        let xc = x.centered(&x_mean);
        let (y_mean, _) = arm_summary(data, &values, sequence);
        let yc: Vec<f64> = rows.iter().map(|&i| values[i] - y_mean).collect();
        let beta = least_squares(&xc, &yc).map_err(|e| match e {
            Error::SingularCovariance(msg) => {
                Error::SingularCovariance(format!("arm {a} covariates: {msg}"))
            }
            other => other,
        })?;
        let residuals =
            yc.iter().enumerate().map(|(k, y)| y - beta.iter().zip(xc.row(k)).map(|(b, v)| b * v).sum::<f64>());
        let (_, variance, _) = mean_and_variance(residuals);
        beta_by_arm[a] = beta;
        arm_residual_variances[a] = variance;
        arm_response_means[a] = y_mean;
        arm_covariate_means[a] = x_mean;
    }

    Ok(AdjustmentFit {
        response,
        beta_by_arm,
        covariate_covariance: data.covariates().covariance(),
        arm_residual_variances,
        arm_response_means,
        arm_covariate_means,
        covariate_mean: data.covariates().column_means(),
        counts,
    })
}

/// ANHECOVA-adjusted crossover estimator.
///
/// `½[{Δ̄₁ − β̂₁ᵀ(X̄₁−X̄)} − {Δ̄₀ − β̂₀ᵀ(X̄₀−X̄)}]` with variance
/// `S²_{1,adj}/(4π₁) + S²_{0,adj}/(4π₀) + ¼(β̂₁−β̂₀)ᵀΣ̂_X(β̂₁−β̂₀)`.
pub fn theta_cr_adj(data: &TrialDataset) -> Result<EstimateReport> {
    let (pi1, pi0) = check_allocation(data.pi1())?;
    let fit = fit_adjustment(data, Response::Delta)?;
    let adjusted = |a: usize| fit.arm_response_means[a] - fit.correction(a);
    let estimate = (adjusted(1) - adjusted(0)) / 2.0;
    let variance = fit.arm_residual_variances[1] / (4.0 * pi1)
        + fit.arm_residual_variances[0] / (4.0 * pi0)
        + fit.slope_gap_term() / 4.0;
    EstimateReport::new(Method::CrAdj, estimate, variance, data.len())
}

/// ANHECOVA-adjusted period-1 estimator: the same construction on `y1`
/// without the crossover halving.
pub fn theta_pr_adj(data: &TrialDataset) -> Result<EstimateReport> {
    let (pi1, pi0) = check_allocation(data.pi1())?;
    let fit = fit_adjustment(data, Response::Y1)?;
    let adjusted = |a: usize| fit.arm_response_means[a] - fit.correction(a);
    let estimate = adjusted(1) - adjusted(0);
    let variance = fit.arm_residual_variances[1] / pi1
        + fit.arm_residual_variances[0] / pi0
        + fit.slope_gap_term();
    EstimateReport::new(Method::PrAdj, estimate, variance, data.len())
}
