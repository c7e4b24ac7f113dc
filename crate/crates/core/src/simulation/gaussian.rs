use alloc::vec::Vec;

use super::cohort::PotentialCohort;
use super::rng::SimRng;
use crate::error::{Error, Result};
use crate::estimators::{Sequence, TrialDataset};
use crate::inference::VarianceComponents;
use crate::numerics::Matrix;

/// Effect sizes and the period-2 loading `b` of the Gaussian model.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GaussianEffects {
    pub theta1: f64,
    pub theta2_tilde: f64,
    pub tau_tilde: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    /// Loading of `X₃` in period 2.
    pub b: f64,
}

/// Gaussian model with three standard normal covariates:
///
/// ```text
/// Y₁⁽⁰⁾  = X₁ + X₂ + X₃ + ε₁
/// Y₁⁽¹⁾  = θ₁ + X₁ + X₂ + X₃ + ε₂
/// Y₂⁽¹⁰⁾ = τ̃ + λ₀ + X₁ + X₂ + bX₃ + ε₃
/// Y₂⁽⁰¹⁾ = τ̃ + θ̃₂ − λ₁ + X₁ + X₂ + bX₃ + ε₄
/// ```
///
/// The two unobservable period-2 outcomes reuse `ε₃` and `ε₄`:
/// `Y₂⁽⁰⁰⁾ = Y₂⁽¹⁰⁾ − λ₀` and `Y₂⁽¹¹⁾ = Y₂⁽⁰¹⁾ + λ₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianDgpParams {
    pub effects: GaussianEffects,
    pub n: usize,
    pub pi1: f64,
}

impl GaussianDgpParams {
    pub fn new(effects: GaussianEffects, n: usize, pi1: f64) -> Result<Self> {
        let params = Self { effects, n, pi1 };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::invalid("Gaussian model needs n >= 4"));
        }
        if !(0.0..=1.0).contains(&self.pi1) {
            return Err(Error::invalid("pi1 must be a probability"));
        }
        let e = &self.effects;
        if [e.theta1, e.theta2_tilde, e.tau_tilde, e.lambda0, e.lambda1, e.b]
            .iter()
            .any(|v| !v.is_finite())
        {
            return Err(Error::invalid("Gaussian model parameters must be finite"));
        }
        Ok(())
    }
}

/// Draw a cohort of `params.n` subjects, then assign sequences
/// independently with probability `pi1`.
///
/// Per subject the stream yields `X₁, X₂, X₃, ε₁, …, ε₄`; the sequence
/// draws follow the whole cohort.
pub fn gaussian_dgp(params: &GaussianDgpParams, rng: &mut SimRng) -> Result<(PotentialCohort, TrialDataset)> {
    params.validate()?;
    let e = params.effects;
    let n = params.n;
    let mut x = Vec::with_capacity(3 * n);
    let mut outcomes: [Vec<f64>; 6] = core::array::from_fn(|_| Vec::with_capacity(n));
    for _ in 0..n {
        let z: [f64; 7] = core::array::from_fn(|_| rng.standard_normal());
        let (x1, x2, x3) = (z[0], z[1], z[2]);
        x.extend_from_slice(&[x1, x2, x3]);
        let period1 = x1 + x2 + x3;
        let period2 = x1 + x2 + e.b * x3;
        let y2_10 = e.tau_tilde + e.lambda0 + period2 + z[5];
        let y2_01 = e.tau_tilde + e.theta2_tilde - e.lambda1 + period2 + z[6];
        outcomes[0].push(period1 + z[3]);
        outcomes[1].push(e.theta1 + period1 + z[4]);
        outcomes[2].push(y2_10 - e.lambda0);
        outcomes[3].push(y2_10);
        outcomes[4].push(y2_01);
        outcomes[5].push(y2_01 + e.lambda1);
    }
    let [y1_0, y1_1, y2_00, y2_10, y2_01, y2_11] = outcomes;
    let cohort = PotentialCohort::new(Matrix::new(n, 3, x)?, y1_0, y1_1, y2_00, y2_10, y2_01, y2_11)?;
    let sequences: Vec<Sequence> = (0..n)
        .map(|_| if rng.bernoulli(params.pi1) { Sequence::TreatFirst } else { Sequence::ControlFirst })
        .collect();
    let data = cohort.assign(sequences, params.pi1)?;
    Ok((cohort, data))
}

/// Closed-form variances of the Gaussian model.
///
/// `sigma2_cr` and `sigma2_cr_adj` are the asymptotic variances of the basic
/// and adjusted crossover estimators, `sigma2_pr` that of the period-1
/// estimator. At `pi1 = ½` they are `(1−b)² + 2`, `2` and `16`. `sigma2` is
/// the period-1 outcome variance (4) and `rho` the correlation between
/// `Y₁⁽¹⁾` and `Y₂⁽¹⁰⁾`.
pub fn gaussian_dgp_truths(params: &GaussianDgpParams) -> VarianceComponents {
    let b = params.effects.b;
    let (pi1, pi0) = (params.pi1, 1.0 - params.pi1);
    let delta_var = (1.0 - b) * (1.0 - b) + 2.0;
    let both = |v: f64, scale: f64| v / (scale * pi1) + v / (scale * pi0);
    VarianceComponents {
        sigma2_cr: both(delta_var, 4.0),
        sigma2_pr: both(4.0, 1.0),
        sigma2_cr_adj: both(2.0, 4.0),
        rho: (b + 2.0) / libm::sqrt(4.0 * (b * b + 3.0)),
        sigma2: 4.0,
    }
}
