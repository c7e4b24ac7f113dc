use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use serde_json::{Map, Value};

use crossover_core::simulation::{
    derive_seed, run_power_study, synthetic_cohort, BaselineCohort, GaussianEffects, PowerStudyConfig,
    PowerStudyResult, ResampleScenario, StudyDgp, TestKind, SYNTHETIC_COHORT_SEED,
};

use super::{design, log_config, report};
use crate::config::{flags_of, resolve, DgpKind, LambdaMode, SimulateConfig};
use crate::error::CliError;
use crate::io::read_cohort_file;
use crate::{GlobalArgs, Output};

#[derive(Debug, Default, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dgp: Option<DgpKind>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replications: Option<u64>,
    /// Comma-separated subset of pr, pr_adj, cr, cr_adj.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tests: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ns: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_mode: Option<LambdaMode>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_tilde: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    /// Cohort CSV (y0 then x_* columns) for the resampling model.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cohort: Option<PathBuf>,
    /// Also write the power table as CSV here.
    #[arg(long)]
    #[serde(skip)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct TestCell {
    test: &'static str,
    power: f64,
    rejections: u64,
    replications: u64,
    mc_se: f64,
    mean_estimate: f64,
    estimate_mc_se: f64,
    mean_variance: f64,
}

#[derive(Debug, Serialize)]
pub struct Cell {
    pub n: usize,
    pub theta: f64,
    pub lambda: f64,
    pub seed: u64,
    pub arm_redraws: u64,
    pub outcome_refits: u64,
    #[serde(skip)]
    pub result: PowerStudyResult,
    tests: Vec<TestCell>,
}

#[derive(Debug, Serialize)]
struct Body<'a> {
    seed: u64,
    cohort: String,
    cells: &'a [Cell],
}

fn tests_of(names: &[String]) -> Result<Vec<TestKind>, CliError> {
    if names.is_empty() {
        return Err(CliError::config("no tests requested"));
    }
    names
        .iter()
        .map(|n| {
            TestKind::from_name(n)
                .ok_or_else(|| CliError::config(format!("unknown test `{n}` (expected pr, pr_adj, cr, cr_adj)")))
        })
        .collect()
}

/// Run every (n, λ, θ) cell of the configured grid, n outermost. Cell `k`
/// uses the seed `derive_seed(cfg.seed, k)`.
pub fn simulate_cells(cfg: &SimulateConfig) -> Result<(Vec<Cell>, String), CliError> {
    let tests = tests_of(&cfg.tests)?;
    if cfg.ns.is_empty() || cfg.thetas.is_empty() || cfg.lambdas.is_empty() {
        return Err(CliError::config("ns, thetas and lambdas must not be empty"));
    }
    let (cohort, cohort_label): (Option<BaselineCohort>, String) = match cfg.dgp {
        DgpKind::Gaussian => {
            if cfg.cohort.is_some() {
                return Err(CliError::config("--cohort only applies to the resample model"));
            }
            (None, "none".into())
        }
        DgpKind::Resample => match &cfg.cohort {
            Some(path) => (Some(read_cohort_file(path, cfg.impute_mode)?), path.display().to_string()),
            None => (Some(synthetic_cohort(SYNTHETIC_COHORT_SEED)), "synthetic".into()),
        },
    };

    let mut cells = Vec::new();
    for &n in &cfg.ns {
        for &lambda_in in &cfg.lambdas {
            for &theta in &cfg.thetas {
                let lambda = match cfg.lambda_mode {
                    LambdaMode::Absolute => lambda_in,
                    LambdaMode::Ratio => lambda_in * theta,
                };
                let dgp = match &cohort {
                    None => StudyDgp::Gaussian(GaussianEffects {
                        theta1: theta,
                        theta2_tilde: theta,
                        tau_tilde: cfg.tau_tilde.unwrap_or(0.0),
                        lambda0: lambda,
                        lambda1: lambda,
                        b: cfg.b,
                    }),
                    Some(c) => StudyDgp::Resample {
                        cohort: c.clone(),
                        scenario: ResampleScenario {
                            theta,
                            lambda,
                            tau_tilde: cfg.tau_tilde.unwrap_or(-0.05),
                            rho: cfg.rho,
                        },
                    },
                };
                let seed = derive_seed(cfg.seed, cells.len() as u64);
                let study = PowerStudyConfig {
                    dgp,
                    replications: cfg.replications,
                    seed,
                    tests: tests.clone(),
                    design: design(n, cfg.pi1, cfg.alpha, cfg.theta_star)?,
                };
                log::info!("simulate: n={n} lambda={lambda} theta={theta} seed={seed}");
                let result = run_power_study(&study)?;
                let test_cells = result
                    .tests
                    .iter()
                    .map(|t| TestCell {
                        test: t.test.name(),
                        power: t.power,
                        rejections: t.rejections,
                        replications: t.replications,
                        mc_se: t.mc_se,
                        mean_estimate: t.mean_estimate,
                        estimate_mc_se: t.estimate_mc_se,
                        mean_variance: t.mean_variance,
                    })
                    .collect();
                cells.push(Cell {
                    n,
                    theta,
                    lambda,
                    seed,
                    arm_redraws: result.arm_redraws,
                    outcome_refits: result.outcome_refits,
                    result,
                    tests: test_cells,
                });
            }
        }
    }
    Ok((cells, cohort_label))
}

/// `n,lambda,theta,power_pr,power_pr_adj,power_cr,power_cr_adj`; tests
/// that were not run are left blank.
pub fn power_table(cells: &[Cell]) -> String {
    let mut csv = String::from("n,lambda,theta,power_pr,power_pr_adj,power_cr,power_cr_adj\n");
    for cell in cells {
        csv.push_str(&format!("{},{},{}", cell.n, cell.lambda, cell.theta));
        for kind in [TestKind::Pr, TestKind::PrAdj, TestKind::Cr, TestKind::CrAdj] {
            csv.push(',');
            if let Some(t) = cell.result.test(kind) {
                csv.push_str(&t.power.to_string());
            }
        }
        csv.push('\n');
    }
    csv
}

pub fn run(file: Option<Map<String, Value>>, global: &GlobalArgs, args: &SimulateArgs) -> Result<Output, CliError> {
    let cfg: SimulateConfig = resolve("simulate", file, flags_of(global, args))?;
    log_config("simulate", &cfg);
    let (cells, cohort) = simulate_cells(&cfg)?;
    let files = args.table.iter().map(|path| (path.clone(), power_table(&cells))).collect();
    let primary = report("simulate", &cfg, Body { seed: cfg.seed, cohort, cells: &cells });
    Ok(Output { primary, files })
}
