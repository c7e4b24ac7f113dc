use clap::Args;
use serde::Serialize;
use serde_json::{Map, Value};

use crossover_core::inference::{carryover_breakeven, pitman_are, sample_size, DesignKind};
use crossover_core::VarianceComponents;

use super::{log_config, report};
use crate::config::{flags_of, resolve, SampleSizeConfig};
use crate::error::CliError;
use crate::{GlobalArgs, Output};

#[derive(Debug, Default, Args, Serialize)]
pub struct SampleSizeArgs {
    /// Alternative effect θ_Alt.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Carry-over sum λ₀ + λ₁.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_sum: Option<f64>,
    /// Type-II error; power is 1 − beta.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Within-subject correlation across periods (with --sigma2).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<f64>,
    /// Variance of the crossover estimator (instead of --rho).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma2_cr: Option<f64>,
    /// Variance of the parallel-group estimator (instead of --rho).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma2_pr: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Exact {
    n_cr: f64,
    n_pr: f64,
    n_cr_carryover: f64,
}

#[derive(Debug, Serialize)]
struct Body {
    sigma2_cr: f64,
    sigma2_pr: f64,
    n_cr: u64,
    n_pr: u64,
    n_cr_carryover: u64,
    are: f64,
    breakeven: f64,
    exact: Exact,
}

fn variances(cfg: &SampleSizeConfig) -> Result<(f64, f64), CliError> {
    match (cfg.rho, cfg.sigma2_cr, cfg.sigma2_pr) {
        (Some(rho), None, None) => {
            let v = VarianceComponents::from_icc(rho, cfg.sigma2.unwrap_or(1.0))?;
            Ok((v.sigma2_cr, v.sigma2_pr))
        }
        (None, Some(cr), Some(pr)) if cfg.sigma2.is_none() => Ok((cr, pr)),
        _ => Err(CliError::config("give either rho (and optionally sigma2) or both sigma2_cr and sigma2_pr")),
    }
}

pub fn run(file: Option<Map<String, Value>>, global: &GlobalArgs, args: &SampleSizeArgs) -> Result<Output, CliError> {
    let cfg: SampleSizeConfig = resolve("samplesize", file, flags_of(global, args))?;
    log_config("samplesize", &cfg);
    let theta = cfg.theta.ok_or_else(|| CliError::config("samplesize needs --theta"))?;
    let (sigma2_cr, sigma2_pr) = variances(&cfg)?;
    let effect = theta - cfg.theta_star;
    let (sd_cr, sd_pr) = (sigma2_cr.sqrt(), sigma2_pr.sqrt());
    let (alpha, beta) = (cfg.alpha, cfg.beta);
    let n_cr = sample_size(DesignKind::CrNoCarryover, effect, 0.0, sd_cr, alpha, beta)?;
    let n_pr = sample_size(DesignKind::Pr, effect, 0.0, sd_pr, alpha, beta)?;
    let n_carry = sample_size(DesignKind::CrCarryover, effect, cfg.lambda_sum, sd_cr, alpha, beta)?;
    let are = pitman_are(sigma2_cr, sigma2_pr, effect, cfg.lambda_sum)?;
    let breakeven = carryover_breakeven(effect, sd_cr, sd_pr)?;
    let body = Body {
        sigma2_cr,
        sigma2_pr,
        n_cr: n_cr.n,
        n_pr: n_pr.n,
        n_cr_carryover: n_carry.n,
        are,
        breakeven,
        exact: Exact { n_cr: n_cr.exact, n_pr: n_pr.exact, n_cr_carryover: n_carry.exact },
    };
    Ok(Output { primary: report("samplesize", &cfg, body), files: Vec::new() })
}
