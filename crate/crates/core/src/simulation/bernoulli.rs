use super::rng::SimRng;
use crate::error::{Error, Result};

/// Joint law of two Bernoulli variables with margins `p1`, `p2` and
/// correlation `rho`, generated as `Z₂ | Z₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryCorrelationSpec {
    p1: f64,
    p2: f64,
    rho: f64,
    /// Joint success probability `P(Z₁ = 1, Z₂ = 1)`.
    s: f64,
}

impl BinaryCorrelationSpec {
    pub fn new(p1: f64, p2: f64, rho: f64) -> Result<Self> {
        for (name, p) in [("p1", p1), ("p2", p2)] {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::invalid(alloc::format!("{name} = {p} is not in (0, 1)")));
            }
        }
        let (lower, upper) = Self::feasible_interval(p1, p2);
        if !(rho > lower && rho < upper) {
            return Err(Error::InfeasibleCorrelation { rho, lower, upper });
        }
        let s = rho * libm::sqrt(p1 * (1.0 - p1) * p2 * (1.0 - p2)) + p1 * p2;
        let spec = Self { p1, p2, rho, s };
        let (given1, given0) = spec.conditional_probabilities();
        if !(given1 > 0.0 && given1 < 1.0 && given0 > 0.0 && given0 < 1.0) {
            return Err(Error::InfeasibleCorrelation { rho, lower, upper });
        }
        Ok(spec)
    }

    /// Open interval of correlations for which both conditional
    /// probabilities lie strictly inside (0, 1).
    pub fn feasible_interval(p1: f64, p2: f64) -> (f64, f64) {
        let (q1, q2) = (1.0 - p1, 1.0 - p2);
        let lower = f64::max(
            -libm::sqrt(p1 * p2 / (q1 * q2)),
            -libm::sqrt(q1 * q2 / (p1 * p2)),
        );
        let upper = f64::min(
            libm::sqrt(p1 * q2 / (p2 * q1)),
            libm::sqrt(p2 * q1 / (p1 * q2)),
        );
        (lower, upper)
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// `(P(Z₂=1 | Z₁=1), P(Z₂=1 | Z₁=0))`.
    pub fn conditional_probabilities(&self) -> (f64, f64) {
        (self.s / self.p1, (self.p2 - self.s) / (1.0 - self.p1))
    }

    /// `joint[a][b] = P(Z₁ = a, Z₂ = b)`, computed from the conditionals.
    pub fn joint_law(&self) -> [[f64; 2]; 2] {
        let (given1, given0) = self.conditional_probabilities();
        let q1 = 1.0 - self.p1;
        [
            [q1 * (1.0 - given0), q1 * given0],
            [self.p1 * (1.0 - given1), self.p1 * given1],
        ]
    }
}

/// Draw `Z₂` given the observed `Z₁ = z1`.
pub fn correlated_bernoulli(spec: &BinaryCorrelationSpec, z1: bool, rng: &mut SimRng) -> bool {
    let (given1, given0) = spec.conditional_probabilities();
    rng.bernoulli(if z1 { given1 } else { given0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn moments(joint: [[f64; 2]; 2]) -> (f64, f64, f64) {
        let m1 = joint[1][0] + joint[1][1];
        let m2 = joint[0][1] + joint[1][1];
        let cov = joint[1][1] - m1 * m2;
        (m1, m2, cov / libm::sqrt(m1 * (1.0 - m1) * m2 * (1.0 - m2)))
    }

    #[test]
    fn zero_correlation_gives_independence() {
        let spec = BinaryCorrelationSpec::new(0.3, 0.6, 0.0).unwrap();
        let (a, b) = spec.conditional_probabilities();
        assert!((a - 0.6).abs() < 1e-15 && (b - 0.6).abs() < 1e-15);
    }

    #[test]
    fn cohort_setting_conditionals() {
        let spec = BinaryCorrelationSpec::new(0.185, 0.135, 0.33).unwrap();
        let (a, b) = spec.conditional_probabilities();
        assert!((a - 0.371_691_04).abs() < 1e-7, "{a}");
        assert!((b - 0.081_272_59).abs() < 1e-7, "{b}");
        assert!((0.185 * a + 0.815 * b - 0.135).abs() < 1e-15);
    }

    #[test]
    fn infeasible_correlation_rejected() {
        let (_, upper) = BinaryCorrelationSpec::feasible_interval(0.185, 0.135);
        assert!((upper - 0.829_186).abs() < 1e-5, "{upper}");
        match BinaryCorrelationSpec::new(0.185, 0.135, 0.99) {
            Err(Error::InfeasibleCorrelation { rho, upper: u, .. }) => {
                assert_eq!(rho, 0.99);
                assert_eq!(u, upper);
            }
            other => panic!("{other:?}"),
        }
        assert!(BinaryCorrelationSpec::new(0.185, 0.135, upper).is_err());
        assert!(BinaryCorrelationSpec::new(0.0, 0.5, 0.1).is_err());
    }

    #[test]
    fn sampled_correlation_matches() {
        let spec = BinaryCorrelationSpec::new(0.185, 0.135, 0.33).unwrap();
        let mut rng = SimRng::stream(2024, 1);
        let n = 400_000;
        let mut counts = [[0u64; 2]; 2];
        for _ in 0..n {
            let z1 = rng.bernoulli(0.185);
            let z2 = correlated_bernoulli(&spec, z1, &mut rng);
            counts[z1 as usize][z2 as usize] += 1;
        }
        let joint = counts.map(|row| row.map(|c| c as f64 / n as f64));
        let (_, m2, rho) = moments(joint);
        assert!((m2 - 0.135).abs() < 0.003, "{m2}");
        assert!((rho - 0.33).abs() < 0.01, "{rho}");
    }

    proptest! {
        #[test]
        fn joint_law_is_exact(p1 in 0.02f64..0.98, p2 in 0.02f64..0.98, t in 0.01f64..0.99) {
            let (lo, hi) = BinaryCorrelationSpec::feasible_interval(p1, p2);
            let rho = lo + t * (hi - lo);
            let spec = BinaryCorrelationSpec::new(p1, p2, rho).unwrap();
            let joint = spec.joint_law();
            let total: f64 = joint.iter().flatten().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            let (m1, m2, r) = moments(joint);
            prop_assert!((m1 - p1).abs() < 1e-12);
            prop_assert!((m2 - p2).abs() < 1e-12);
            prop_assert!((r - rho).abs() < 1e-9);
        }
    }
}
