use crate::error::{Error, Result};
use crate::numerics::normal_quantile;

/// Mean structure of the six potential outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EffectScenario {
    /// Baseline mean of the period-1 control outcome.
    pub mu: f64,
    /// Period-1 treatment effect.
    pub theta1: f64,
    /// Period-2 effect of staying on treatment versus staying on control.
    pub theta2_tilde: f64,
    /// Period-2 minus period-1 change under control throughout.
    pub tau_tilde: f64,
    /// Carry-over of treatment into period-2 control.
    pub lambda0: f64,
    /// Carry-over of treatment into period-2 treatment (enters with a minus sign).
    pub lambda1: f64,
}

/// Expected potential outcomes, in the order
/// `Y1(0), Y1(1), Y2(00), Y2(10), Y2(11), Y2(01)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialOutcomeMeans {
    pub y1_0: f64,
    pub y1_1: f64,
    pub y2_00: f64,
    pub y2_10: f64,
    pub y2_11: f64,
    pub y2_01: f64,
}

impl PotentialOutcomeMeans {
    pub fn to_array(self) -> [f64; 6] {
        [self.y1_0, self.y1_1, self.y2_00, self.y2_10, self.y2_11, self.y2_01]
    }
}

/// With `carryover == false` the period-2 outcomes depend only on the
/// period-2 treatment: `tau_tilde` plays the trend and `theta2_tilde` the
/// period-2 effect, and both carry-over terms are ignored.
pub fn potential_outcome_means(s: &EffectScenario, carryover: bool) -> PotentialOutcomeMeans {
    let base2 = s.mu + s.tau_tilde;
    if carryover {
        PotentialOutcomeMeans {
            y1_0: s.mu,
            y1_1: s.mu + s.theta1,
            y2_00: base2,
            y2_10: base2 + s.lambda0,
            y2_11: base2 + s.theta2_tilde,
            y2_01: base2 + s.theta2_tilde - s.lambda1,
        }
    } else {
        PotentialOutcomeMeans {
            y1_0: s.mu,
            y1_1: s.mu + s.theta1,
            y2_00: base2,
            y2_10: base2,
            y2_11: base2 + s.theta2_tilde,
            y2_01: base2 + s.theta2_tilde,
        }
    }
}

/// What the basic crossover estimator converges to: `½(θ₁ + θ̃₂ − λ₀ − λ₁)`.
pub fn expected_basic_estimand(s: &EffectScenario) -> f64 {
    0.5 * (s.theta1 + s.theta2_tilde - s.lambda0 - s.lambda1)
}

/// Sample size, allocation, one-sided level and null margin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignParams {
    pub n: usize,
    pub pi1: f64,
    pub alpha: f64,
    /// Null boundary θ*: 0 for superiority, positive for non-inferiority.
    pub theta_star: f64,
}

impl DesignParams {
    pub fn new(n: usize, pi1: f64, alpha: f64, theta_star: f64) -> Result<Self> {
        if n < 4 {
            return Err(Error::invalid("design needs n >= 4"));
        }
        if !(pi1 > 0.0 && pi1 < 1.0) {
            return Err(Error::invalid("pi1 must lie in (0, 1)"));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid("alpha must lie in (0, 1)"));
        }
        if !theta_star.is_finite() {
            return Err(Error::invalid("theta_star must be finite"));
        }
        Ok(Self { n, pi1, alpha, theta_star })
    }

    /// `z_{1-α}`.
    pub fn critical_value(&self) -> f64 {
        critical_value(self.alpha)
    }
}

pub(crate) fn critical_value(alpha: f64) -> f64 {
    // alpha is validated by every constructor that reaches here
    normal_quantile(1.0 - alpha).unwrap_or(f64::NAN)
}

/// Asymptotic variances feeding the power formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceComponents {
    pub sigma2_cr: f64,
    pub sigma2_pr: f64,
    pub sigma2_cr_adj: f64,
    /// Period-1/period-2 correlation across treatments in the equal-variance model.
    pub rho: f64,
    /// Common outcome variance in the equal-variance model.
    pub sigma2: f64,
}

impl VarianceComponents {
    /// Equal-variance model: every potential outcome has variance `sigma2`
    /// and period outcomes under different treatments correlate at `rho`.
    /// Then `σ²_cr = 2(1-ρ)σ²` and `σ²_pr = 4σ²`. No covariates are assumed,
    /// so the adjusted variance equals the unadjusted one.
    pub fn from_icc(rho: f64, sigma2: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::invalid("rho must lie in [0, 1)"));
        }
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::invalid("sigma2 must be positive"));
        }
        let sigma2_cr = 2.0 * (1.0 - rho) * sigma2;
        Ok(Self { sigma2_cr, sigma2_pr: 4.0 * sigma2, sigma2_cr_adj: sigma2_cr, rho, sigma2 })
    }
}
