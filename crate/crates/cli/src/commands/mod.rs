use serde::Serialize;

use crossover_core::{DesignParams, Method};

use crate::error::CliError;

pub mod estimate;
pub mod power;
pub mod samplesize;
pub mod sensitivity;
pub mod simulate;

/// Common head of every JSON report.
#[derive(Debug, Serialize)]
pub struct Report<'a, C, B> {
    pub command: &'static str,
    pub engine_version: &'static str,
    pub config: &'a C,
    #[serde(flatten)]
    pub body: B,
}

pub fn report<C: Serialize, B: Serialize>(command: &'static str, config: &C, body: B) -> String {
    crate::json::to_string(&Report { command, engine_version: crossover_core::ENGINE_VERSION, config, body })
}

pub fn log_config<C: Serialize>(command: &str, config: &C) {
    log::info!(
        "{command}: resolved config {}",
        serde_json::to_string(config).unwrap_or_else(|e| e.to_string())
    );
}

pub fn design(n: usize, pi1: f64, alpha: f64, theta_star: f64) -> Result<DesignParams, CliError> {
    Ok(DesignParams::new(n, pi1, alpha, theta_star)?)
}

pub fn parse_methods(names: &[String]) -> Result<Vec<Method>, CliError> {
    if names.is_empty() {
        return Err(CliError::config("no methods requested"));
    }
    names
        .iter()
        .map(|name| {
            Method::from_name(name).ok_or_else(|| {
                CliError::config(format!("unknown method `{name}` (expected cr, cr_alt, pr, cr_adj, pr_adj)"))
            })
        })
        .collect()
}
