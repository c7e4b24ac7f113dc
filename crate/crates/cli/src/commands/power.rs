use clap::Args;
use serde::Serialize;
use serde_json::{Map, Value};

use crossover_core::inference::{power_crossover, power_parallel};
use crossover_core::simulation::{gaussian_dgp_truths, GaussianDgpParams, GaussianEffects};

use super::{design, log_config};
use crate::config::{flags_of, resolve, PowerConfig};
use crate::error::CliError;
use crate::{GlobalArgs, Output};

const MAX_GRID_POINTS: usize = 1_000_000;

#[derive(Debug, Default, Args, Serialize)]
pub struct PowerArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_step: Option<f64>,
    /// Carry-over effects, applied as λ₀ = λ₁ = λ.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    /// Period-2 loadings of X₃.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bs: Option<Vec<f64>>,
    /// Comma-separated subset of pr, cr, cr_adj.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tests: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerRow {
    pub theta: f64,
    pub lambda: f64,
    pub b: f64,
    pub test: &'static str,
    pub power: f64,
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

/// `theta_min, theta_min + step, …` up to `theta_max`, rounded to 12 decimals.
pub fn theta_grid(cfg: &PowerConfig) -> Result<Vec<f64>, CliError> {
    let (lo, hi, step) = (cfg.theta_min, cfg.theta_max, cfg.theta_step);
    if !(lo.is_finite() && hi.is_finite() && hi >= lo) {
        return Err(CliError::config("theta grid needs finite theta_min <= theta_max"));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(CliError::config("theta_step must be positive"));
    }
    let count = ((hi - lo) / step + 1e-9).floor();
    if count + 1.0 > MAX_GRID_POINTS as f64 {
        return Err(CliError::config("theta grid is too large"));
    }
    Ok((0..=count as usize).map(|i| round12(lo + i as f64 * step)).collect())
}

/// Every grid point, ordered by b, λ, θ, then test.
pub fn power_grid(cfg: &PowerConfig) -> Result<Vec<PowerRow>, CliError> {
    let thetas = theta_grid(cfg)?;
    if cfg.lambdas.is_empty() || cfg.bs.is_empty() {
        return Err(CliError::config("lambdas and bs must not be empty"));
    }
    if cfg.lambdas.iter().chain(&cfg.bs).any(|v| !v.is_finite()) {
        return Err(CliError::config("lambdas and bs must be finite"));
    }
    let tests: Vec<&'static str> = cfg
        .tests
        .iter()
        .map(|t| match t.as_str() {
            "pr" => Ok("pr"),
            "cr" => Ok("cr"),
            "cr_adj" => Ok("cr_adj"),
            other => Err(CliError::config(format!("unknown test `{other}` (expected pr, cr, cr_adj)"))),
        })
        .collect::<Result<_, _>>()?;
    if tests.is_empty() {
        return Err(CliError::config("no tests requested"));
    }
    let design = design(cfg.n, cfg.pi1, cfg.alpha, cfg.theta_star)?;
    let mut rows = Vec::with_capacity(thetas.len() * cfg.lambdas.len() * cfg.bs.len() * tests.len());
    for &b in &cfg.bs {
        let params = GaussianDgpParams::new(GaussianEffects { b, ..Default::default() }, cfg.n, cfg.pi1)?;
        let truths = gaussian_dgp_truths(&params);
        for &lambda in &cfg.lambdas {
            for &theta in &thetas {
                let effect = theta - cfg.theta_star;
                for &test in &tests {
                    let power = match test {
                        "pr" => power_parallel(effect, truths.sigma2_pr.sqrt(), &design)?,
                        "cr" => power_crossover(effect, lambda, lambda, truths.sigma2_cr.sqrt(), &design)?,
                        _ => power_crossover(effect, lambda, lambda, truths.sigma2_cr_adj.sqrt(), &design)?,
                    };
                    rows.push(PowerRow { theta, lambda, b, test, power });
                }
            }
        }
    }
    Ok(rows)
}

pub fn run(file: Option<Map<String, Value>>, global: &GlobalArgs, args: &PowerArgs) -> Result<Output, CliError> {
    let cfg: PowerConfig = resolve("power", file, flags_of(global, args))?;
    log_config("power", &cfg);
    let mut csv = String::from("theta,lambda,b,test,analytic_power\n");
    for row in power_grid(&cfg)? {
        csv.push_str(&format!("{},{},{},{},{}\n", row.theta, row.lambda, row.b, row.test, row.power));
    }
    Ok(Output { primary: csv, files: Vec::new() })
}
