use alloc::vec::Vec;

use super::linalg::{dot, Matrix};
use super::logistic::{expit, SolveReport};
use crate::error::{Error, Result};

/// Default bisection bracket, in logit units.
pub const CALIBRATION_BRACKET: (f64, f64) = (-40.0, 40.0);
const MAX_BISECTIONS: usize = 200;
const TARGET_TOLERANCE: f64 = 1e-10;

/// Mean over rows of `expit(intercept + slopesᵀx)`.
pub fn mean_expit(intercept: f64, slopes: &[f64], covariates: &Matrix) -> f64 {
    let n = covariates.rows();
    (0..n)
        .map(|i| expit(intercept + dot(slopes, covariates.row(i))))
        .sum::<f64>()
        / n as f64
}

/// Intercept `a` such that the mean of `expit(a + slopesᵀx)` over the rows
/// equals `target_mean`.
pub fn calibrate_intercept(slopes: &[f64], covariates: &Matrix, target_mean: f64) -> Result<f64> {
    calibrate_intercept_within(slopes, covariates, target_mean, CALIBRATION_BRACKET)
        .map(|report| report.value)
}

/// Bisection on a caller-supplied bracket. The map from intercept to mean
/// probability is strictly increasing, so any bracket containing the root
/// yields the same answer.
pub fn calibrate_intercept_within(
    slopes: &[f64],
    covariates: &Matrix,
    target_mean: f64,
    bracket: (f64, f64),
) -> Result<SolveReport> {
    if !(target_mean > 0.0 && target_mean < 1.0) {
        return Err(Error::TargetOutOfRange { target: target_mean });
    }
    if covariates.rows() == 0 {
        return Err(Error::invalid("calibration needs at least one row"));
    }
    if slopes.len() != covariates.cols() {
        return Err(Error::invalid("slope count does not match covariate columns"));
    }
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) {
        return Err(Error::invalid("calibration bracket must satisfy lo < hi"));
    }

    let offsets: Vec<f64> = (0..covariates.rows()).map(|i| dot(slopes, covariates.row(i))).collect();
    let gap = |a: f64| {
        offsets.iter().map(|o| expit(a + o)).sum::<f64>() / offsets.len() as f64 - target_mean
    };
    if gap(lo) > 0.0 || gap(hi) < 0.0 {
        return Err(Error::NonConvergence {
            iterations: 0,
            detail: "calibration bracket does not contain the target".into(),
        });
    }

    let mut iterations = 0;
    let mut mid = 0.5 * (lo + hi);
    let mut residual = gap(mid);
    while iterations < MAX_BISECTIONS {
        iterations += 1;
        if residual == 0.0 {
            break;
        }
        if residual < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        let next = 0.5 * (lo + hi);
        if next == lo || next == hi {
            break;
        }
        mid = next;
        residual = gap(mid);
    }
    let residual = residual.abs();
    let converged = residual <= TARGET_TOLERANCE;
    if !converged {
        return Err(Error::NonConvergence {
            iterations,
            detail: alloc::format!("calibration gap {residual:e} above {TARGET_TOLERANCE:e}"),
        });
    }
    Ok(SolveReport { value: mid, iterations, converged, residual })
}
