use alloc::format;

use super::design::{critical_value, DesignParams};
use crate::error::{Error, Result};
use crate::numerics::{normal_quantile, phi};

fn check_sigma(sigma: f64, what: &str) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} must be positive and finite")))
    }
}

/// Rejection rate of the basic crossover test at the null boundary when the
/// carry-over sum is `lambda0 + lambda1`:
/// `Φ(−z_{1−α} − √n·½(λ₀+λ₁)/σ̃_cr)`.
pub fn type1_error_cr(lambda0: f64, lambda1: f64, sigma_cr: f64, design: &DesignParams) -> Result<f64> {
    check_sigma(sigma_cr, "sigma_cr")?;
    let shift = libm::sqrt(design.n as f64) * 0.5 * (lambda0 + lambda1) / sigma_cr;
    Ok(phi(-design.critical_value() - shift))
}

/// Power of a crossover Z-test (basic or adjusted, depending on `sigma`).
///
/// `effect_minus_star` is `½(θ₁+θ̃₂) − θ*`.
pub fn power_crossover(
    effect_minus_star: f64,
    lambda0: f64,
    lambda1: f64,
    sigma: f64,
    design: &DesignParams,
) -> Result<f64> {
    power_crossover_at(design.n as f64, effect_minus_star, lambda0, lambda1, sigma, design.alpha)
}

/// [`power_crossover`] at a real-valued sample size.
pub fn power_crossover_at(
    n: f64,
    effect_minus_star: f64,
    lambda0: f64,
    lambda1: f64,
    sigma: f64,
    alpha: f64,
) -> Result<f64> {
    check_sigma(sigma, "sigma")?;
    check_level(alpha, "alpha")?;
    let root_n = libm::sqrt(n);
    let drift = root_n * effect_minus_star - root_n * 0.5 * (lambda0 + lambda1);
    Ok(phi(-critical_value(alpha) + drift / sigma))
}

/// Power of the period-1 (parallel-group) Z-test; `theta1_minus_star` is `θ₁ − θ*`.
pub fn power_parallel(theta1_minus_star: f64, sigma_pr: f64, design: &DesignParams) -> Result<f64> {
    power_parallel_at(design.n as f64, theta1_minus_star, sigma_pr, design.alpha)
}

pub fn power_parallel_at(n: f64, theta1_minus_star: f64, sigma_pr: f64, alpha: f64) -> Result<f64> {
    check_sigma(sigma_pr, "sigma_pr")?;
    check_level(alpha, "alpha")?;
    Ok(phi(-critical_value(alpha) + libm::sqrt(n) * theta1_minus_star / sigma_pr))
}

fn check_level(p: f64, what: &str) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} must lie in (0, 1)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DesignKind {
    /// Crossover, no carry-over.
    CrNoCarryover,
    /// Crossover with a known carry-over sum.
    CrCarryover,
    /// Parallel group (period 1 only).
    Pr,
}

/// Required sample size: the ceiling and the real-valued solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSize {
    pub n: u64,
    pub exact: f64,
}

/// `(z_{1−α} + z_{1−β})² σ² / (effect − ½·carryover_sum)²`, rounded up.
///
/// `effect` already has θ* subtracted. `carryover_sum` is only used for
/// [`DesignKind::CrCarryover`].
pub fn sample_size(
    kind: DesignKind,
    effect: f64,
    carryover_sum: f64,
    sigma: f64,
    alpha: f64,
    beta: f64,
) -> Result<SampleSize> {
    check_sigma(sigma, "sigma")?;
    check_level(alpha, "alpha")?;
    check_level(beta, "beta")?;
    let bias = match kind {
        DesignKind::CrCarryover => 0.5 * carryover_sum,
        DesignKind::CrNoCarryover | DesignKind::Pr => 0.0,
    };
    let detectable = effect - bias;
    if !(detectable > 0.0) {
        return Err(Error::InfeasibleDesign(format!(
            "detectable effect {effect} - {bias} = {detectable} is not positive"
        )));
    }
    let z = critical_value(alpha) + normal_quantile(1.0 - beta)?;
    let exact = z * z * sigma * sigma / (detectable * detectable);
    Ok(SampleSize { n: libm::ceil(exact) as u64, exact })
}

/// Sample-size ratio crossover/parallel at equal power:
/// `(σ̃²_cr/σ²_pr)·{1 − carryover_sum/(2θ_Alt)}⁻²`.
pub fn pitman_are(sigma2_cr: f64, sigma2_pr: f64, theta_alt: f64, carryover_sum: f64) -> Result<f64> {
    check_sigma(sigma2_cr, "sigma2_cr")?;
    check_sigma(sigma2_pr, "sigma2_pr")?;
    if !(theta_alt > 0.0) {
        return Err(Error::invalid("theta_alt must be positive"));
    }
    let factor = 1.0 - carryover_sum / (2.0 * theta_alt);
    if factor == 0.0 || !factor.is_finite() {
        return Err(Error::InfeasibleDesign(format!(
            "carry-over sum {carryover_sum} equals 2 * theta_alt; the crossover test has no power"
        )));
    }
    Ok(sigma2_cr / sigma2_pr / (factor * factor))
}

/// Largest `½(λ₀+λ₁)` for which the crossover design still needs fewer
/// subjects than the parallel one: `θ_Alt·(1 − σ̃_cr/σ_pr)`.
pub fn carryover_breakeven(theta_alt: f64, sigma_cr: f64, sigma_pr: f64) -> Result<f64> {
    check_sigma(sigma_cr, "sigma_cr")?;
    check_sigma(sigma_pr, "sigma_pr")?;
    if !(theta_alt > 0.0) {
        return Err(Error::invalid("theta_alt must be positive"));
    }
    if sigma_cr >= sigma_pr {
        return Err(Error::InfeasibleDesign(format!(
            "sigma_cr {sigma_cr} >= sigma_pr {sigma_pr}: crossover is never more efficient"
        )));
    }
    Ok(theta_alt * (1.0 - sigma_cr / sigma_pr))
}

/// Allocation minimising `a/π₁ + b/(1−π₁)`: `√a/(√a+√b)`.
pub fn optimal_allocation(var_arm1: f64, var_arm0: f64) -> Result<f64> {
    check_sigma(var_arm1, "var_arm1")?;
    check_sigma(var_arm0, "var_arm0")?;
    let (a, b) = (libm::sqrt(var_arm1), libm::sqrt(var_arm0));
    Ok(a / (a + b))
}
