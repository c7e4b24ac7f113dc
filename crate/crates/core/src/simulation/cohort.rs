use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::rng::SimRng;
use crate::error::{Error, Result};
use crate::estimators::{Sequence, TrialDataset};
use crate::numerics::{logit, Matrix};

/// Covariates and all six potential outcomes of every subject, before
/// treatment assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialCohort {
    pub covariates: Matrix,
    pub y1_0: Vec<f64>,
    pub y1_1: Vec<f64>,
    pub y2_00: Vec<f64>,
    pub y2_10: Vec<f64>,
    pub y2_01: Vec<f64>,
    pub y2_11: Vec<f64>,
}

impl PotentialCohort {
    pub fn new(
        covariates: Matrix,
        y1_0: Vec<f64>,
        y1_1: Vec<f64>,
        y2_00: Vec<f64>,
        y2_10: Vec<f64>,
        y2_01: Vec<f64>,
        y2_11: Vec<f64>,
    ) -> Result<Self> {
        let n = covariates.rows();
        let cohort = Self { covariates, y1_0, y1_1, y2_00, y2_10, y2_01, y2_11 };
        if cohort.outcome_columns().iter().any(|c| c.len() != n) {
            return Err(Error::invalid("potential outcome columns differ in length"));
        }
        if cohort
            .outcome_columns()
            .iter()
            .flat_map(|c| c.iter())
            .chain(cohort.covariates.as_slice())
            .any(|v| !v.is_finite())
        {
            return Err(Error::invalid("potential cohort values must be finite"));
        }
        Ok(cohort)
    }

    pub fn len(&self) -> usize {
        self.covariates.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Outcome columns in the order y1_0, y1_1, y2_00, y2_10, y2_01, y2_11.
    pub fn outcome_columns(&self) -> [&[f64]; 6] {
        [&self.y1_0, &self.y1_1, &self.y2_00, &self.y2_10, &self.y2_01, &self.y2_11]
    }

    pub fn is_binary(&self) -> bool {
        self.outcome_columns().iter().flat_map(|c| c.iter()).all(|&v| v == 0.0 || v == 1.0)
    }

    /// Observed `(y1, y2)` of subject `i` under `sequence`.
    #[inline]
    pub fn reveal(&self, i: usize, sequence: Sequence) -> (f64, f64) {
        match sequence {
            Sequence::TreatFirst => (self.y1_1[i], self.y2_10[i]),
            Sequence::ControlFirst => (self.y1_0[i], self.y2_01[i]),
        }
    }

    /// Observed trial when subject `i` follows `sequences[i]`.
    pub fn assign(&self, sequences: Vec<Sequence>, pi1: f64) -> Result<TrialDataset> {
        if sequences.len() != self.len() {
            return Err(Error::invalid("one sequence per subject is required"));
        }
        let (y1, y2) = sequences.iter().enumerate().map(|(i, &s)| self.reveal(i, s)).unzip();
        TrialDataset::from_columns(sequences, self.covariates.clone(), y1, y2, pi1)
    }
}

/// Sample `n` subjects with replacement, assign each to the treatment-first
/// sequence with probability `pi1`, and reveal the observed outcomes.
///
/// Per subject the stream yields the row index, then the sequence draw.
/// Arm sizes are not checked.
pub fn draw_trial(cohort: &PotentialCohort, n: usize, pi1: f64, rng: &mut SimRng) -> Result<TrialDataset> {
    if cohort.is_empty() {
        return Err(Error::invalid("cannot draw a trial from an empty cohort"));
    }
    if !(0.0..=1.0).contains(&pi1) {
        return Err(Error::invalid("pi1 must be a probability"));
    }
    let p = cohort.covariates.cols();
    let mut x = Vec::with_capacity(n * p);
    let mut sequences = Vec::with_capacity(n);
    let mut y1 = Vec::with_capacity(n);
    let mut y2 = Vec::with_capacity(n);
    for _ in 0..n {
        let i = rng.index(cohort.len());
        let seq = if rng.bernoulli(pi1) { Sequence::TreatFirst } else { Sequence::ControlFirst };
        let (a, b) = cohort.reveal(i, seq);
        x.extend_from_slice(cohort.covariates.row(i));
        sequences.push(seq);
        y1.push(a);
        y2.push(b);
    }
    TrialDataset::from_columns(sequences, Matrix::new(n, p, x)?, y1, y2, pi1)
}

/// Baseline covariates and binary baseline outcome of a reference cohort.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineCohort {
    covariate_names: Vec<String>,
    covariates: Matrix,
    y0: Vec<f64>,
}

impl BaselineCohort {
    pub fn new(covariate_names: Vec<String>, covariates: Matrix, y0: Vec<f64>) -> Result<Self> {
        if y0.is_empty() {
            return Err(Error::invalid("baseline cohort is empty"));
        }
        if covariates.rows() != y0.len() {
            return Err(Error::invalid("covariate rows and baseline outcomes differ in length"));
        }
        if covariate_names.len() != covariates.cols() {
            return Err(Error::invalid("one name per covariate column is required"));
        }
        if let Some(i) = y0.iter().position(|&v| v != 0.0 && v != 1.0) {
            return Err(Error::invalid(alloc::format!("baseline outcome of row {i} is not 0 or 1")));
        }
        if covariates.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("covariates must be finite"));
        }
        Ok(Self { covariate_names, covariates, y0 })
    }

    pub fn covariate_names(&self) -> &[String] {
        &self.covariate_names
    }

    pub fn covariates(&self) -> &Matrix {
        &self.covariates
    }

    pub fn y0(&self) -> &[f64] {
        &self.y0
    }

    pub fn len(&self) -> usize {
        self.y0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y0.is_empty()
    }

    pub fn baseline_mean(&self) -> f64 {
        self.y0.iter().sum::<f64>() / self.y0.len() as f64
    }
}

pub const SYNTHETIC_COHORT_SIZE: usize = 336;
pub const SYNTHETIC_COHORT_SEED: u64 = 0x5EED_0336;
const SYNTHETIC_POSITIVES: usize = 62;

/// Stand-in for a 336-subject reference cohort.
///
/// Covariates: age (rounded normal, mean 26.5, sd 5.89, redrawn below 18),
/// three marital-status dummies against a "single" reference level, and two
/// rare infection indicators. The 62 subjects with the highest latent
/// logistic score have baseline outcome 1 (mean 0.1845).
pub fn synthetic_cohort(seed: u64) -> BaselineCohort {
    let mut rng = SimRng::stream(seed, 0);
    let n = SYNTHETIC_COHORT_SIZE;
    let mut x = Vec::with_capacity(n * 6);
    let mut latent = Vec::with_capacity(n);
    for _ in 0..n {
        let age = loop {
            let a = libm::round(26.5 + 5.89 * rng.standard_normal());
            if a >= 18.0 {
                break a;
            }
        };
        let u = rng.uniform();
        let marital = [u < 0.116, (0.116..0.205).contains(&u), (0.205..0.714).contains(&u)];
        let gonorrhea = rng.bernoulli(0.060);
        let chlamydia = rng.bernoulli(0.161);
        let row = [
            age,
            f64::from(u8::from(marital[0])),
            f64::from(u8::from(marital[1])),
            f64::from(u8::from(marital[2])),
            f64::from(u8::from(gonorrhea)),
            f64::from(u8::from(chlamydia)),
        ];
        let score = -0.06 * (age - 26.5) - 0.5 * row[1] - 0.2 * row[2] + 0.2 * row[3]
            + 0.6 * row[4]
            + 0.4 * row[5]
            + logit(rng.uniform());
        x.extend_from_slice(&row);
        latent.push(score);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| latent[b].total_cmp(&latent[a]).then(a.cmp(&b)));
    let mut y0 = alloc::vec![0.0; n];
    for &i in &order[..SYNTHETIC_POSITIVES] {
        y0[i] = 1.0;
    }
    let names = ["age", "married", "cohabiting", "partner_not_cohabiting", "gonorrhea", "chlamydia"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let covariates = Matrix::new(n, 6, x).expect("six columns per row");
    BaselineCohort::new(names, covariates, y0).expect("synthetic cohort is well formed")
}
