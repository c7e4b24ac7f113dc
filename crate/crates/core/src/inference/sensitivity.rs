use super::design::DesignParams;
use crate::error::{Error, Result};
use crate::estimators::EstimateReport;
use crate::numerics::phi;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestOutcome {
    pub statistic: f64,
    pub reject: bool,
    /// `1 − Φ(statistic)`.
    pub p_value: f64,
}

impl TestOutcome {
    fn from_statistic(statistic: f64, design: &DesignParams) -> Self {
        Self {
            statistic,
            reject: statistic > design.critical_value(),
            p_value: phi(-statistic),
        }
    }
}

/// Lower bound Λ ≤ 0 on the carry-over bias `½(λ₀+λ₁)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivitySpec {
    lambda_bound: f64,
}

impl SensitivitySpec {
    pub fn new(lambda_bound: f64) -> Result<Self> {
        if !(lambda_bound <= 0.0) {
            return Err(Error::invalid("sensitivity bound must be nonpositive"));
        }
        Ok(Self { lambda_bound })
    }

    pub fn lambda_bound(&self) -> f64 {
        self.lambda_bound
    }
}

fn standard_error(report: &EstimateReport) -> Result<f64> {
    if report.standard_error > 0.0 {
        Ok(report.standard_error)
    } else {
        Err(Error::DegenerateVariance)
    }
}

/// `√n(θ̂ − θ*)/σ̂ > z_{1−α}`, using the report's own `n` and `σ̂`.
/// Only `alpha` and `theta_star` are read from `design`.
pub fn one_sided_test(report: &EstimateReport, design: &DesignParams) -> Result<TestOutcome> {
    let se = standard_error(report)?;
    Ok(TestOutcome::from_statistic((report.estimate - design.theta_star) / se, design))
}

/// One-sided test shifted by the bias bound: `√n(θ̂ − θ* + Λ)/σ̂ > z_{1−α}`.
pub fn sensitivity_test(
    report: &EstimateReport,
    design: &DesignParams,
    spec: &SensitivitySpec,
) -> Result<TestOutcome> {
    let se = standard_error(report)?;
    let shifted = report.estimate - design.theta_star + spec.lambda_bound;
    Ok(TestOutcome::from_statistic(shifted / se, design))
}

/// Bias bound at which the sensitivity statistic equals the critical value:
/// `z_{1−α}σ̂/√n − (θ̂ − θ*)`. The test rejects for every Λ strictly above it.
/// A positive value means no admissible (nonpositive) Λ rejects.
pub fn tipping_point(report: &EstimateReport, design: &DesignParams) -> Result<f64> {
    let se = standard_error(report)?;
    Ok(design.critical_value() * se - (report.estimate - design.theta_star))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::Method;

    const SQRT3: f64 = 1.732_050_807_568_877_2;

    fn design() -> DesignParams {
        DesignParams::new(500, 0.5, 0.025, 0.0).unwrap()
    }

    fn report(estimate: f64) -> EstimateReport {
        EstimateReport::from_summary(Method::Cr, estimate, SQRT3, 500).unwrap()
    }

    #[test]
    fn test_at_null_boundary() {
        let d = DesignParams::new(500, 0.5, 0.025, 0.2).unwrap();
        let t = one_sided_test(&report(0.2), &d).unwrap();
        assert_eq!(t.statistic, 0.0);
        assert_eq!(t.p_value, 0.5);
        assert!(!t.reject);
    }

    #[test]
    fn test_examples() {
        let t = one_sided_test(&report(0.3), &design()).unwrap();
        assert!((t.statistic - 3.872_983_346_207_417).abs() < 1e-9);
        assert!(t.reject && t.p_value < 0.025);
        let t = one_sided_test(&report(-0.3), &design()).unwrap();
        assert!((t.statistic + 3.872_983_346_207_417).abs() < 1e-9);
        assert!(!t.reject && t.p_value > 0.025);
    }

    #[test]
    fn zero_standard_error() {
        let r = EstimateReport::from_summary(Method::Cr, 0.3, 0.0, 500).unwrap();
        assert_eq!(one_sided_test(&r, &design()), Err(Error::DegenerateVariance));
        assert_eq!(tipping_point(&r, &design()), Err(Error::DegenerateVariance));
    }

    #[test]
    fn sensitivity_examples() {
        let r = report(0.3);
        let zero = SensitivitySpec::new(0.0).unwrap();
        assert_eq!(sensitivity_test(&r, &design(), &zero).unwrap(), one_sided_test(&r, &design()).unwrap());
        let t = sensitivity_test(&r, &design(), &SensitivitySpec::new(-0.1).unwrap()).unwrap();
        assert!((t.statistic - 2.581_988_897_471_611).abs() < 1e-9);
        assert!(t.reject);
        assert!(SensitivitySpec::new(0.1).is_err());
    }

    #[test]
    fn tipping_point_examples() {
        let tip = tipping_point(&report(0.3), &design()).unwrap();
        assert!((tip + 0.148_181_842_574_2).abs() < 1e-9, "{tip}");
        let below = SensitivitySpec::new(tip - 1e-6).unwrap();
        let above = SensitivitySpec::new(tip + 1e-6).unwrap();
        assert!(!sensitivity_test(&report(0.3), &design(), &below).unwrap().reject);
        assert!(sensitivity_test(&report(0.3), &design(), &above).unwrap().reject);

        // Estimate sitting exactly on the unadjusted boundary.
        let se = SQRT3 / libm::sqrt(500.0);
        let boundary = report(design().critical_value() * se);
        assert!(tipping_point(&boundary, &design()).unwrap().abs() < 1e-15);

        let bigger = EstimateReport::from_summary(Method::Cr, 0.3, SQRT3, 1000).unwrap();
        assert!(tipping_point(&bigger, &design()).unwrap() < tip);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn zero_bound_agrees_with_plain_test(est in -2.0f64..2.0, sigma in 0.1f64..5.0, n in 4usize..5000) {
                let r = EstimateReport::from_summary(Method::Cr, est, sigma, n).unwrap();
                let d = DesignParams::new(n, 0.5, 0.025, 0.05).unwrap();
                prop_assert_eq!(
                    sensitivity_test(&r, &d, &SensitivitySpec::new(0.0).unwrap()).unwrap(),
                    one_sided_test(&r, &d).unwrap()
                );
            }

            #[test]
            fn reject_iff_p_below_alpha(est in -2.0f64..2.0, sigma in 0.1f64..5.0) {
                let r = EstimateReport::from_summary(Method::Cr, est, sigma, 200).unwrap();
                let t = one_sided_test(&r, &design()).unwrap();
                prop_assert_eq!(t.reject, t.p_value < 0.025);
            }
        }
    }
}
