use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use serde_json::{Map, Value};

use crossover_core::inference::one_sided_test;
use crossover_core::EstimateReport;

use super::{design, log_config, parse_methods, report};
use crate::config::{flags_of, resolve, EstimateConfig};
use crate::error::CliError;
use crate::io::read_trial_file;
use crate::{GlobalArgs, Output};

#[derive(Debug, Default, Args, Serialize)]
pub struct EstimateArgs {
    /// Trial CSV with columns arm, y1, y2 and optional x_* covariates.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    /// Comma-separated subset of cr, cr_alt, pr, cr_adj, pr_adj.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub methods: Option<Vec<String>>,
}

#[derive(Debug, Serialize)]
struct MethodResult {
    method: &'static str,
    estimate: f64,
    asymptotic_variance: f64,
    standard_error: f64,
    /// Absent when the standard error is zero.
    statistic: Option<f64>,
    p_value: Option<f64>,
    reject: bool,
    degenerate_variance: bool,
}

#[derive(Debug, Serialize)]
struct ArmCounts {
    control_first: usize,
    treat_first: usize,
}

#[derive(Debug, Serialize)]
struct Body {
    n: usize,
    arm_counts: ArmCounts,
    covariates: Vec<String>,
    results: Vec<MethodResult>,
}

pub fn run(file: Option<Map<String, Value>>, global: &GlobalArgs, args: &EstimateArgs) -> Result<Output, CliError> {
    let cfg: EstimateConfig = resolve("estimate", file, flags_of(global, args))?;
    log_config("estimate", &cfg);
    let methods = parse_methods(&cfg.methods)?;
    let path = cfg.data.as_ref().ok_or_else(|| CliError::config("estimate needs --data"))?;
    let table = read_trial_file(path, cfg.pi1, cfg.impute_mode)?;
    let data = &table.data;
    let design = design(data.len(), cfg.pi1, cfg.alpha, cfg.theta_star)?;

    let mut results = Vec::with_capacity(methods.len());
    for method in methods {
        let est: EstimateReport = method.estimate(data)?;
        let test = if est.degenerate_variance { None } else { Some(one_sided_test(&est, &design)?) };
        results.push(MethodResult {
            method: method.name(),
            estimate: est.estimate,
            asymptotic_variance: est.asymptotic_variance,
            standard_error: est.standard_error,
            statistic: test.map(|t| t.statistic),
            p_value: test.map(|t| t.p_value),
            reject: test.is_some_and(|t| t.reject),
            degenerate_variance: est.degenerate_variance,
        });
    }
    let [control_first, treat_first] = data.arm_counts();
    let body = Body {
        n: data.len(),
        arm_counts: ArmCounts { control_first, treat_first },
        covariates: table.covariate_names.clone(),
        results,
    };
    Ok(Output { primary: report("estimate", &cfg, body), files: Vec::new() })
}
