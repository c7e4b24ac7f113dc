//! Point and variance estimation from observed crossover data.
//!
//! Every estimator returns an [`EstimateReport`] whose `asymptotic_variance`
//! is scaled so that `standard_error = sqrt(asymptotic_variance / n)`.

mod adjusted;
mod basic;
mod dataset;

pub use adjusted::{fit_adjustment, theta_cr_adj, theta_pr_adj, AdjustmentFit, Response};
pub use basic::{compute_deltas, theta_cr, theta_cr_alt, theta_pr, DeltaView};
pub use dataset::{Sequence, SubjectRecord, TrialDataset};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Half the difference of arm-wise mean period changes.
    Cr,
    /// Pooled mean of sign-aligned period changes.
    CrAlt,
    /// Period-1 difference in means.
    Pr,
    /// ANHECOVA-adjusted crossover estimator.
    CrAdj,
    /// ANHECOVA-adjusted period-1 estimator.
    PrAdj,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Cr, Method::CrAlt, Method::Pr, Method::CrAdj, Method::PrAdj];

    pub fn name(self) -> &'static str {
        match self {
            Method::Cr => "cr",
            Method::CrAlt => "cr_alt",
            Method::Pr => "pr",
            Method::CrAdj => "cr_adj",
            Method::PrAdj => "pr_adj",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }

    /// Runs the estimator this method names.
    pub fn estimate(self, data: &TrialDataset) -> Result<EstimateReport> {
        match self {
            Method::Cr => theta_cr(data),
            Method::CrAlt => theta_cr_alt(data),
            Method::Pr => theta_pr(data),
            Method::CrAdj => theta_cr_adj(data),
            Method::PrAdj => theta_pr_adj(data),
        }
    }
}

impl core::fmt::Display for Method {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateReport {
    pub method: Method,
    pub estimate: f64,
    pub asymptotic_variance: f64,
    pub standard_error: f64,
    pub n: usize,
    /// Set when the variance estimate is exactly zero (SE = 0).
    pub degenerate_variance: bool,
}

impl EstimateReport {
    pub fn new(method: Method, estimate: f64, asymptotic_variance: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("estimate report needs n > 0"));
        }
        if !estimate.is_finite() || !(asymptotic_variance >= 0.0) || !asymptotic_variance.is_finite() {
            return Err(Error::invalid("estimate and variance must be finite, variance nonnegative"));
        }
        Ok(Self {
            method,
            estimate,
            asymptotic_variance,
            standard_error: libm::sqrt(asymptotic_variance / n as f64),
            n,
            degenerate_variance: asymptotic_variance == 0.0,
        })
    }

    /// Report from summary statistics: point estimate, `sigma` (the square
    /// root of the asymptotic variance) and sample size.
    pub fn from_summary(method: Method, estimate: f64, sigma: f64, n: usize) -> Result<Self> {
        if !(sigma >= 0.0) {
            return Err(Error::invalid("sigma must be nonnegative"));
        }
        Self::new(method, estimate, sigma * sigma, n)
    }

    /// Square root of the asymptotic variance.
    pub fn sigma(&self) -> f64 {
        libm::sqrt(self.asymptotic_variance)
    }
}

/// Mean and `(n - 1)`-divisor sample variance, two-pass.
pub(crate) fn mean_and_variance<I>(values: I) -> (f64, f64, usize)
where
    I: Iterator<Item = f64> + Clone,
{
    let mut count = 0usize;
    let mut sum = 0.0;
    for v in values.clone() {
        sum += v;
        count += 1;
    }
    if count == 0 {
        return (f64::NAN, f64::NAN, 0);
    }
    let mean = sum / count as f64;
    if count == 1 {
        return (mean, 0.0, 1);
    }
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, ss / (count - 1) as f64, count)
}

pub(crate) fn check_allocation(pi1: f64) -> Result<(f64, f64)> {
    if pi1 > 0.0 && pi1 < 1.0 {
        Ok((pi1, 1.0 - pi1))
    } else {
        Err(Error::invalid("allocation probability pi1 must lie in (0, 1)"))
    }
}
