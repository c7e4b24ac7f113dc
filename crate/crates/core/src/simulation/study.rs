use alloc::boxed::Box;
use alloc::vec::Vec;

use super::cohort::{draw_trial, BaselineCohort};
use super::gaussian::{gaussian_dgp, GaussianDgpParams, GaussianEffects};
use super::resample::{ResamplePipeline, ResampleScenario};
use super::rng::SimRng;
use crate::error::{Error, Result};
use crate::estimators::{Method, TrialDataset};
use crate::inference::{one_sided_test, DesignParams};

/// Redraws allowed when a simulated trial leaves an arm too small.
const MAX_ARM_REDRAWS: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TestKind {
    Pr,
    PrAdj,
    Cr,
    CrAdj,
}

impl TestKind {
    pub const ALL: [TestKind; 4] = [TestKind::Pr, TestKind::PrAdj, TestKind::Cr, TestKind::CrAdj];

    pub fn method(self) -> Method {
        match self {
            TestKind::Pr => Method::Pr,
            TestKind::PrAdj => Method::PrAdj,
            TestKind::Cr => Method::Cr,
            TestKind::CrAdj => Method::CrAdj,
        }
    }

    pub fn name(self) -> &'static str {
        self.method().name()
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == name)
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl core::fmt::Display for TestKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StudyDgp {
    /// Gaussian model; `n` and `pi1` come from the study design.
    Gaussian(GaussianEffects),
    /// Binary outcomes resampled from a baseline cohort.
    Resample { cohort: BaselineCohort, scenario: ResampleScenario },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerStudyConfig {
    pub dgp: StudyDgp,
    pub replications: u64,
    pub seed: u64,
    pub tests: Vec<TestKind>,
    pub design: DesignParams,
}

impl PowerStudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::invalid("a power study needs at least one replication"));
        }
        if self.tests.is_empty() {
            return Err(Error::invalid("no tests requested"));
        }
        for (i, t) in self.tests.iter().enumerate() {
            if self.tests[..i].contains(t) {
                return Err(Error::invalid(alloc::format!("test {t} requested twice")));
            }
        }
        DesignParams::new(self.design.n, self.design.pi1, self.design.alpha, self.design.theta_star)?;
        if let StudyDgp::Gaussian(effects) = self.dgp {
            GaussianDgpParams::new(effects, self.design.n, self.design.pi1)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestSummary {
    pub test: TestKind,
    pub rejections: u64,
    pub replications: u64,
    /// `rejections / replications`.
    pub power: f64,
    /// `√(p̂(1−p̂)/R)`.
    pub mc_se: f64,
    pub mean_estimate: f64,
    /// Replication standard deviation of the estimate over `√R`.
    pub estimate_mc_se: f64,
    /// Replication mean of the estimated asymptotic variance.
    pub mean_variance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerStudyResult {
    /// In the order the tests were requested.
    pub tests: Vec<TestSummary>,
    /// Trials redrawn because an arm was too small.
    pub arm_redraws: u64,
    /// Period-2 outcome draws repeated after a failed logistic fit.
    pub outcome_refits: u64,
}

impl PowerStudyResult {
    pub fn test(&self, kind: TestKind) -> Option<&TestSummary> {
        self.tests.iter().find(|t| t.test == kind)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Draw {
    estimate: f64,
    variance: f64,
    reject: bool,
}

#[derive(Debug, Clone, Copy)]
struct Replicate {
    draws: [Draw; 4],
    arm_redraws: u32,
    outcome_refits: u32,
}

enum Source {
    Gaussian(GaussianDgpParams),
    Resample(ResamplePipeline),
}

fn prepare(config: &PowerStudyConfig) -> Result<Source> {
    config.validate()?;
    Ok(match &config.dgp {
        StudyDgp::Gaussian(effects) => {
            Source::Gaussian(GaussianDgpParams::new(*effects, config.design.n, config.design.pi1)?)
        }
        StudyDgp::Resample { cohort, scenario } => {
            Source::Resample(ResamplePipeline::prepare(cohort.clone(), *scenario)?)
        }
    })
}

fn analyse(config: &PowerStudyConfig, data: &TrialDataset) -> Result<[Draw; 4]> {
    let mut draws = [Draw::default(); 4];
    for &test in &config.tests {
        let report = test.method().estimate(data)?;
        let outcome = one_sided_test(&report, &config.design)?;
        draws[test.slot()] = Draw {
            estimate: report.estimate,
            variance: report.asymptotic_variance,
            reject: outcome.reject,
        };
    }
    Ok(draws)
}

fn replicate(config: &PowerStudyConfig, source: &Source, index: u64) -> Result<Replicate> {
    let mut rng = SimRng::stream(config.seed, index);
    let (cohort, outcome_refits) = match source {
        Source::Gaussian(_) => (None, 0),
        Source::Resample(pipeline) => {
            let (cohort, report) = pipeline.build(&mut rng)?;
            (Some(cohort), report.refits)
        }
    };
    let mut arm_redraws = 0;
    loop {
        let data = match (source, &cohort) {
            (Source::Gaussian(params), _) => gaussian_dgp(params, &mut rng)?.1,
            (_, Some(c)) => draw_trial(c, config.design.n, config.design.pi1, &mut rng)?,
            (Source::Resample(_), None) => unreachable!("resampled cohort is built above"),
        };
        match analyse(config, &data) {
            Ok(draws) => return Ok(Replicate { draws, arm_redraws, outcome_refits }),
            Err(Error::EmptyArm { .. }) if arm_redraws < MAX_ARM_REDRAWS => arm_redraws += 1,
            Err(e) => return Err(e),
        }
    }
}

fn run_one(config: &PowerStudyConfig, source: &Source, index: u64) -> Result<Replicate> {
    replicate(config, source, index).map_err(|e| Error::Replication { index, source: Box::new(e) })
}

fn reduce(config: &PowerStudyConfig, replicates: Vec<Result<Replicate>>) -> Result<PowerStudyResult> {
    let replicates: Vec<Replicate> = replicates.into_iter().collect::<Result<_>>()?;
    let r = replicates.len() as f64;
    let tests = config
        .tests
        .iter()
        .map(|&test| {
            let slot = test.slot();
            let rejections = replicates.iter().filter(|x| x.draws[slot].reject).count() as u64;
            let mean_estimate = replicates.iter().map(|x| x.draws[slot].estimate).sum::<f64>() / r;
            let mean_variance = replicates.iter().map(|x| x.draws[slot].variance).sum::<f64>() / r;
            let spread = if replicates.len() > 1 {
                replicates
                    .iter()
                    .map(|x| {
                        let d = x.draws[slot].estimate - mean_estimate;
                        d * d
                    })
                    .sum::<f64>()
                    / (r - 1.0)
            } else {
                0.0
            };
            let power = rejections as f64 / r;
            TestSummary {
                test,
                rejections,
                replications: config.replications,
                power,
                mc_se: libm::sqrt(power * (1.0 - power) / r),
                mean_estimate,
                estimate_mc_se: libm::sqrt(spread / r),
                mean_variance,
            }
        })
        .collect();
    Ok(PowerStudyResult {
        tests,
        arm_redraws: replicates.iter().map(|x| u64::from(x.arm_redraws)).sum(),
        outcome_refits: replicates.iter().map(|x| u64::from(x.outcome_refits)).sum(),
    })
}

/// Run every replication and tally the requested tests.
///
/// Replication `r` draws from stream `r` of `config.seed`, and tallies are
/// reduced in replication order, so the result does not depend on whether
/// the `parallel` feature is enabled. The first failing replication (by
/// index) is reported.
pub fn run_power_study(config: &PowerStudyConfig) -> Result<PowerStudyResult> {
    let source = prepare(config)?;
    #[cfg(feature = "parallel")]
    let replicates = {
        use rayon::prelude::*;
        (0..config.replications)
            .into_par_iter()
            .map(|index| run_one(config, &source, index))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let replicates = (0..config.replications).map(|index| run_one(config, &source, index)).collect();
    reduce(config, replicates)
}

/// [`run_power_study`] on the calling thread only.
pub fn run_power_study_serial(config: &PowerStudyConfig) -> Result<PowerStudyResult> {
    let source = prepare(config)?;
    let replicates = (0..config.replications).map(|index| run_one(config, &source, index)).collect();
    reduce(config, replicates)
}
