use alloc::vec::Vec;

use super::{check_allocation, mean_and_variance, EstimateReport, Method, Sequence, TrialDataset};
use crate::error::{Error, Result};

const MIN_PER_ARM: usize = 2;

/// Within-subject period differences and their arm summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaView {
    /// `y1 - y2` per subject, dataset order.
    pub deltas: Vec<f64>,
    /// Arm means, indexed by [`Sequence::index`].
    pub means: [f64; 2],
    /// Arm sample variances, `(n_a - 1)` divisor.
    pub variances: [f64; 2],
    pub counts: [usize; 2],
}

pub(crate) fn require_arms(data: &TrialDataset, required: usize) -> Result<[usize; 2]> {
    let counts = data.arm_counts();
    for (arm, &count) in counts.iter().enumerate() {
        if count < required {
            return Err(Error::EmptyArm { arm: arm as u8, count, required });
        }
    }
    Ok(counts)
}

/// Arm mean and variance of `values` restricted to `sequence`.
pub(crate) fn arm_summary(data: &TrialDataset, values: &[f64], sequence: Sequence) -> (f64, f64) {
    let seqs = data.sequences();
    let it = values.iter().zip(seqs).filter(move |(_, s)| **s == sequence).map(|(v, _)| *v);
    let (mean, var, _) = mean_and_variance(it);
    (mean, var)
}

pub fn compute_deltas(data: &TrialDataset) -> Result<DeltaView> {
    let counts = require_arms(data, MIN_PER_ARM)?;
    let deltas: Vec<f64> = data.y1().iter().zip(data.y2()).map(|(a, b)| a - b).collect();
    let (m0, v0) = arm_summary(data, &deltas, Sequence::ControlFirst);
    let (m1, v1) = arm_summary(data, &deltas, Sequence::TreatFirst);
    Ok(DeltaView { deltas, means: [m0, m1], variances: [v0, v1], counts })
}

/// Basic crossover estimator `(mean_1(Δ) - mean_0(Δ)) / 2` with variance
/// `S²_1/(4π₁) + S²_0/(4π₀)`.
pub fn theta_cr(data: &TrialDataset) -> Result<EstimateReport> {
    let view = compute_deltas(data)?;
    let (pi1, pi0) = check_allocation(data.pi1())?;
    let estimate = (view.means[1] - view.means[0]) / 2.0;
    let variance = view.variances[1] / (4.0 * pi1) + view.variances[0] / (4.0 * pi0);
    EstimateReport::new(Method::Cr, estimate, variance, data.len())
}

/// Pooled mean of `A(y1 - y2) + (1 - A)(y2 - y1)`.
///
/// The mean is written as `(S_1/(n/2) - S_0/(n/2)) / 2` with `S_a` the arm sums
/// of `y1 - y2`, so it coincides bit for bit with [`theta_cr`] when the arms
/// are the same size. The variance is the sample variance of the signed
/// differences.
pub fn theta_cr_alt(data: &TrialDataset) -> Result<EstimateReport> {
    let view = compute_deltas(data)?;
    let half = data.len() as f64 / 2.0;
    let sums = [
        view.means[0] * view.counts[0] as f64,
        view.means[1] * view.counts[1] as f64,
    ];
    // Arm means are recovered exactly when n_a = n/2, so route through them.
    let arm_term = |arm: usize| {
        if view.counts[arm] as f64 == half {
            view.means[arm]
        } else {
            sums[arm] / half
        }
    };
    let estimate = (arm_term(1) - arm_term(0)) / 2.0;
    let signed = view.deltas.iter().zip(data.sequences()).map(|(d, s)| match s {
        Sequence::TreatFirst => *d,
        Sequence::ControlFirst => -*d,
    });
    let (_, variance, _) = mean_and_variance(signed);
    EstimateReport::new(Method::CrAlt, estimate, variance, data.len())
}

/// Period-1 difference in arm means, variance `S²_1/π₁ + S²_0/π₀`.
pub fn theta_pr(data: &TrialDataset) -> Result<EstimateReport> {
    require_arms(data, MIN_PER_ARM)?;
    let (pi1, pi0) = check_allocation(data.pi1())?;
    let (m0, v0) = arm_summary(data, data.y1(), Sequence::ControlFirst);
    let (m1, v1) = arm_summary(data, data.y1(), Sequence::TreatFirst);
    EstimateReport::new(Method::Pr, m1 - m0, v1 / pi1 + v0 / pi0, data.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::SubjectRecord;
    use alloc::vec;

    pub(crate) fn dataset(rows: &[(u8, f64, f64)], pi1: f64) -> TrialDataset {
        TrialDataset::new(
            rows.iter().map(|&(a, y1, y2)| SubjectRecord {
                sequence: Sequence::from_indicator(a).unwrap(),
                covariates: vec![],
                y1,
                y2,
            }),
            pi1,
        )
        .unwrap()
    }

    // arm 1 deltas {2, 4}, arm 0 deltas {1, -1}
    fn hand() -> TrialDataset {
        dataset(&[(1, 3.0, 1.0), (0, 1.0, 0.0), (1, 5.0, 1.0), (0, 0.0, 1.0)], 0.5)
    }

    #[test]
    fn deltas_by_hand() {
        let v = compute_deltas(&hand()).unwrap();
        assert_eq!(v.means, [0.0, 3.0]);
        assert_eq!(v.variances, [2.0, 2.0]);
        assert_eq!(v.counts, [2, 2]);
        assert_eq!(v.deltas, vec![2.0, 1.0, 4.0, -1.0]);
    }

    #[test]
    fn deltas_zero_when_periods_equal() {
        let d = dataset(&[(1, 2.0, 2.0), (0, 1.0, 1.0), (1, -3.0, -3.0), (0, 7.0, 7.0)], 0.5);
        let v = compute_deltas(&d).unwrap();
        assert!(v.deltas.iter().all(|&x| x == 0.0));
        assert_eq!(v.means, [0.0, 0.0]);
    }

    #[test]
    fn deltas_order_invariant() {
        let d = dataset(&[(0, 0.0, 1.0), (1, 5.0, 1.0), (0, 1.0, 0.0), (1, 3.0, 1.0)], 0.5);
        let (a, b) = (compute_deltas(&d).unwrap(), compute_deltas(&hand()).unwrap());
        assert_eq!(a.means, b.means);
        assert_eq!(a.variances, b.variances);
    }

    #[test]
    fn small_arm_is_rejected() {
        let d = dataset(&[(1, 1.0, 0.0), (1, 2.0, 0.0), (0, 1.0, 1.0)], 0.5);
        assert_eq!(
            compute_deltas(&d),
            Err(Error::EmptyArm { arm: 0, count: 1, required: 2 })
        );
        assert!(matches!(theta_pr(&d), Err(Error::EmptyArm { arm: 0, .. })));
        assert!(matches!(theta_cr_alt(&d), Err(Error::EmptyArm { .. })));
    }

    #[test]
    fn theta_cr_by_hand() {
        let r = theta_cr(&hand()).unwrap();
        assert_eq!(r.estimate, 1.5);
        assert_eq!(r.asymptotic_variance, 2.0);
        assert!((r.standard_error - libm::sqrt(0.5)).abs() < 1e-15);
        assert_eq!(r.method, Method::Cr);
    }

    #[test]
    fn theta_cr_null_data() {
        let d = dataset(&[(1, 1.0, 1.0), (0, 1.0, 1.0), (1, 1.0, 1.0), (0, 1.0, 1.0)], 0.5);
        let r = theta_cr(&d).unwrap();
        assert_eq!(r.estimate, 0.0);
        assert!(r.degenerate_variance);
        assert_eq!(r.standard_error, 0.0);
    }

    #[test]
    fn theta_cr_alt_by_hand() {
        let r = theta_cr_alt(&hand()).unwrap();
        assert_eq!(r.estimate, 1.5);
        assert_eq!(r.estimate, theta_cr(&hand()).unwrap().estimate);
        let d = dataset(&[(1, 1.0, 1.0), (0, 2.0, 2.0), (1, 0.0, 0.0), (0, 4.0, 4.0)], 0.5);
        assert_eq!(theta_cr_alt(&d).unwrap().estimate, 0.0);
    }

    #[test]
    fn theta_cr_alt_differs_under_unequal_arms() {
        // arm 1 deltas {2, 4, 6}, arm 0 deltas {1, -1}
        let d = dataset(
            &[(1, 3.0, 1.0), (0, 1.0, 0.0), (1, 5.0, 1.0), (0, 0.0, 1.0), (1, 6.0, 0.0)],
            0.5,
        );
        let alt = theta_cr_alt(&d).unwrap().estimate;
        // (2 + 4 + 6 - 1 + 1) / 5
        assert!((alt - 2.4).abs() < 1e-12);
        assert!((theta_cr(&d).unwrap().estimate - 2.0).abs() < 1e-12);
    }

    #[test]
    fn theta_pr_by_hand() {
        let d = dataset(&[(1, 1.0, 9.0), (0, 0.0, 9.0), (1, 3.0, 9.0), (0, 2.0, 9.0)], 0.5);
        let r = theta_pr(&d).unwrap();
        assert_eq!(r.estimate, 1.0);
        assert_eq!(r.asymptotic_variance, 8.0);
        let null = dataset(&[(1, 2.0, 0.0), (0, 2.0, 1.0), (1, 2.0, 5.0), (0, 2.0, 3.0)], 0.5);
        assert_eq!(theta_pr(&null).unwrap().estimate, 0.0);
    }

    #[test]
    fn allocation_must_be_interior() {
        let d = hand().with_pi1(1.0).unwrap();
        assert!(matches!(theta_cr(&d), Err(Error::InvalidInput(_))));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn rows() -> impl Strategy<Value = Vec<(u8, f64, f64)>> {
            proptest::collection::vec((0u8..2, -50.0f64..50.0, -50.0f64..50.0), 4..40)
        }

        proptest! {
            #[test]
            fn equal_allocation_identity(
                half in proptest::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 2..30),
                other in proptest::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 30),
            ) {
                let mut r: Vec<(u8, f64, f64)> = half.iter().map(|&(a, b)| (1, a, b)).collect();
                r.extend(other.iter().take(half.len()).map(|&(a, b)| (0, a, b)));
                let d = dataset(&r, 0.5);
                prop_assert_eq!(theta_cr(&d).unwrap().estimate, theta_cr_alt(&d).unwrap().estimate);
            }

            #[test]
            fn common_shift_leaves_theta_cr(r in rows(), c in -100.0f64..100.0) {
                let d = dataset(&r, 0.4);
                prop_assume!(d.arm_counts().iter().all(|&k| k >= 2));
                let shifted: Vec<_> = r.iter().map(|&(a, y1, y2)| (a, y1 + c, y2 + c)).collect();
                let s = dataset(&shifted, 0.4);
                let (a, b) = (theta_cr(&d).unwrap(), theta_cr(&s).unwrap());
                prop_assert!((a.estimate - b.estimate).abs() < 1e-9);
                prop_assert!((a.asymptotic_variance - b.asymptotic_variance).abs()
                    < 1e-9 * (1.0 + a.asymptotic_variance));
            }

            #[test]
            fn period_one_shift_leaves_theta_pr(r in rows(), c in -100.0f64..100.0) {
                let d = dataset(&r, 0.5);
                prop_assume!(d.arm_counts().iter().all(|&k| k >= 2));
                let shifted: Vec<_> = r.iter().map(|&(a, y1, y2)| (a, y1 + c, y2)).collect();
                let (a, b) = (theta_pr(&d).unwrap(), theta_pr(&dataset(&shifted, 0.5)).unwrap());
                prop_assert!((a.estimate - b.estimate).abs() < 1e-9);
            }

            #[test]
            fn joint_relabel_is_symmetric(r in rows(), pi1 in 0.1f64..0.9) {
                let d = dataset(&r, pi1);
                prop_assume!(d.arm_counts().iter().all(|&k| k >= 2));
                let flipped: Vec<_> = r.iter().map(|&(a, y1, y2)| (1 - a, y2, y1)).collect();
                let f = dataset(&flipped, 1.0 - pi1);
                let (a, b) = (theta_cr(&d).unwrap(), theta_cr(&f).unwrap());
                prop_assert!((a.estimate - b.estimate).abs() < 1e-9);
                prop_assert!((a.asymptotic_variance - b.asymptotic_variance).abs()
                    < 1e-9 * (1.0 + a.asymptotic_variance));
            }

            #[test]
            fn subject_order_irrelevant(r in rows(), rot in 0usize..40) {
                let d = dataset(&r, 0.5);
                prop_assume!(d.arm_counts().iter().all(|&k| k >= 2));
                let mut rotated = r.clone();
                let k = rot % rotated.len();
                rotated.rotate_left(k);
                let (a, b) = (theta_cr(&d).unwrap(), theta_cr(&dataset(&rotated, 0.5)).unwrap());
                prop_assert!((a.estimate - b.estimate).abs() < 1e-9);
            }
        }
    }
}
