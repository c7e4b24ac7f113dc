use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numerics::Matrix;

/// Treatment sequence of a subject.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sequence {
    /// Control in period 1, treatment in period 2 (arm indicator 0).
    ControlFirst,
    /// Treatment in period 1, control in period 2 (arm indicator 1).
    TreatFirst,
}

impl Sequence {
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Sequence::ControlFirst => 0,
            Sequence::TreatFirst => 1,
        }
    }

    pub fn from_indicator(arm: u8) -> Option<Self> {
        match arm {
            0 => Some(Sequence::ControlFirst),
            1 => Some(Sequence::TreatFirst),
            _ => None,
        }
    }

    #[inline]
    pub fn indicator(self) -> u8 {
        self.index() as u8
    }

    pub fn flipped(self) -> Self {
        match self {
            Sequence::ControlFirst => Sequence::TreatFirst,
            Sequence::TreatFirst => Sequence::ControlFirst,
        }
    }
}

/// One observed subject.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectRecord {
    pub sequence: Sequence,
    pub covariates: Vec<f64>,
    pub y1: f64,
    pub y2: f64,
}

/// Observed two-period data, stored column-wise.
///
/// Arm sizes are not checked here; estimators reject arms that are too small.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialDataset {
    sequences: Vec<Sequence>,
    covariates: Matrix,
    y1: Vec<f64>,
    y2: Vec<f64>,
    pi1: f64,
}

impl TrialDataset {
    pub fn new<I>(records: I, pi1: f64) -> Result<Self>
    where
        I: IntoIterator<Item = SubjectRecord>,
    {
        let mut sequences = Vec::new();
        let mut y1 = Vec::new();
        let mut y2 = Vec::new();
        let mut covariates = Matrix::zeros(0, 0);
        let mut dim = None;
        for (i, rec) in records.into_iter().enumerate() {
            match dim {
                None => dim = Some(rec.covariates.len()),
                Some(d) if d != rec.covariates.len() => {
                    return Err(Error::invalid(format!(
                        "subject {i} has {} covariates, expected {d}",
                        rec.covariates.len()
                    )))
                }
                _ => {}
            }
            sequences.push(rec.sequence);
            y1.push(rec.y1);
            y2.push(rec.y2);
            if rec.covariates.is_empty() {
                continue;
            }
            covariates.push_row(&rec.covariates)?;
        }
        if dim == Some(0) || dim.is_none() {
            covariates = Matrix::zeros(sequences.len(), 0);
        }
        Self::from_columns(sequences, covariates, y1, y2, pi1)
    }

    pub fn from_columns(
        sequences: Vec<Sequence>,
        covariates: Matrix,
        y1: Vec<f64>,
        y2: Vec<f64>,
        pi1: f64,
    ) -> Result<Self> {
        let n = sequences.len();
        if y1.len() != n || y2.len() != n || covariates.rows() != n {
            return Err(Error::invalid("dataset columns differ in length"));
        }
        if let Some(i) = y1.iter().chain(&y2).position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("outcome {} is not finite", i % n.max(1))));
        }
        if covariates.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("covariates must be finite"));
        }
        if !(0.0..=1.0).contains(&pi1) {
            return Err(Error::invalid("pi1 must be a probability"));
        }
        Ok(Self { sequences, covariates, y1, y2, pi1 })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    /// Declared design probability of the treatment-first sequence.
    #[inline]
    pub fn pi1(&self) -> f64 {
        self.pi1
    }

    pub fn sequences(&self) -> &[Sequence] {
        &self.sequences
    }

    pub fn y1(&self) -> &[f64] {
        &self.y1
    }

    pub fn y2(&self) -> &[f64] {
        &self.y2
    }

    pub fn covariates(&self) -> &Matrix {
        &self.covariates
    }

    pub fn covariate_dim(&self) -> usize {
        self.covariates.cols()
    }

    /// Subject counts indexed by [`Sequence::index`].
    pub fn arm_counts(&self) -> [usize; 2] {
        let treat = self.sequences.iter().filter(|s| **s == Sequence::TreatFirst).count();
        [self.len() - treat, treat]
    }

    /// Row indices of subjects on `sequence`, in dataset order.
    pub fn arm_indices(&self, sequence: Sequence) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.sequences[i] == sequence).collect()
    }

    pub fn record(&self, i: usize) -> SubjectRecord {
        SubjectRecord {
            sequence: self.sequences[i],
            covariates: self.covariates.row(i).to_vec(),
            y1: self.y1[i],
            y2: self.y2[i],
        }
    }

    pub fn records(&self) -> impl Iterator<Item = SubjectRecord> + '_ {
        (0..self.len()).map(|i| self.record(i))
    }

    pub fn with_pi1(mut self, pi1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&pi1) {
            return Err(Error::invalid("pi1 must be a probability"));
        }
        self.pi1 = pi1;
        Ok(self)
    }
}
