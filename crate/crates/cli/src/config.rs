//! Run configuration: built-in defaults, then a JSON config file, then
//! command-line flags.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

pub const DEFAULT_SEED: u64 = 20_240_607;

fn object(value: Value, what: &str) -> Result<Map<String, Value>, CliError> {
    match value {
        Value::Object(map) => Ok(map),
        _ => Err(CliError::config(format!("{what} must be a JSON object"))),
    }
}

pub fn read_config_file(path: &Path) -> Result<Map<String, Value>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    object(value, &format!("config file {}", path.display()))
}

/// Merge `file` and `flags` over `T::default()` and deserialize.
///
/// Keys that `T` does not know are rejected, naming their origin.
pub fn resolve<T>(command: &str, file: Option<Map<String, Value>>, flags: Map<String, Value>) -> Result<T, CliError>
where
    T: Serialize + DeserializeOwned + Default,
{
    let mut merged = object(serde_json::to_value(T::default()).expect("defaults serialize"), "defaults")?;
    for (key, value) in file.into_iter().flatten() {
        if !merged.contains_key(&key) {
            return Err(CliError::config(format!("config key `{key}` is not used by `{command}`")));
        }
        merged.insert(key, value);
    }
    for (key, value) in flags {
        if !merged.contains_key(&key) {
            return Err(CliError::config(format!(
                "--{} does not apply to `{command}`",
                key.replace('_', "-")
            )));
        }
        merged.insert(key, value);
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::config(format!("{command}: {e}")))
}

/// Flags that were given, as one JSON object. Unset options must be
/// skipped by the flag structs' serializers.
pub fn flags_of(global: &impl Serialize, command: &impl Serialize) -> Map<String, Value> {
    let mut out = Map::new();
    for value in [serde_json::to_value(global), serde_json::to_value(command)] {
        if let Ok(Value::Object(map)) = value {
            out.extend(map);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateConfig {
    pub data: Option<PathBuf>,
    pub methods: Vec<String>,
    pub pi1: f64,
    pub alpha: f64,
    pub theta_star: f64,
    pub impute_mode: bool,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        Self {
            data: None,
            methods: ["cr", "cr_alt", "pr", "cr_adj", "pr_adj"].map(String::from).to_vec(),
            pi1: 0.5,
            alpha: 0.025,
            theta_star: 0.0,
            impute_mode: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerConfig {
    pub n: usize,
    pub pi1: f64,
    pub alpha: f64,
    pub theta_star: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub theta_step: f64,
    pub lambdas: Vec<f64>,
    pub bs: Vec<f64>,
    pub tests: Vec<String>,
}

impl Default for PowerConfig {
    fn default() -> Self {
        Self {
            n: 500,
            pi1: 0.5,
            alpha: 0.025,
            theta_star: 0.0,
            theta_min: 0.0,
            theta_max: 0.5,
            theta_step: 0.01,
            lambdas: vec![-0.1, 0.0, 0.1, 0.3],
            bs: vec![0.0, 1.0 / 3.0],
            tests: ["pr", "cr", "cr_adj"].map(String::from).to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSizeConfig {
    /// Alternative effect `θ_Alt`; the tested margin is `theta - theta_star`.
    pub theta: Option<f64>,
    pub theta_star: f64,
    /// `λ₀ + λ₁` assumed for the carry-over sample size.
    pub lambda_sum: f64,
    pub alpha: f64,
    pub beta: f64,
    pub rho: Option<f64>,
    pub sigma2: Option<f64>,
    pub sigma2_cr: Option<f64>,
    pub sigma2_pr: Option<f64>,
}

impl Default for SampleSizeConfig {
    fn default() -> Self {
        Self {
            theta: None,
            theta_star: 0.0,
            lambda_sum: 0.0,
            alpha: 0.025,
            beta: 0.1,
            rho: None,
            sigma2: None,
            sigma2_cr: None,
            sigma2_pr: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum DgpKind {
    Gaussian,
    Resample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum LambdaMode {
    /// `lambdas` are carry-over effects.
    Absolute,
    /// `lambdas` are multiples of θ.
    Ratio,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub dgp: DgpKind,
    pub replications: u64,
    pub seed: u64,
    pub tests: Vec<String>,
    pub ns: Vec<usize>,
    pub thetas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub lambda_mode: LambdaMode,
    /// Period-2 loading of `X₃` (Gaussian model).
    pub b: f64,
    /// Period effect; defaults to 0 (Gaussian) or −0.05 (resampling).
    pub tau_tilde: Option<f64>,
    /// Baseline/period-2 outcome correlation (resampling).
    pub rho: f64,
    /// Cohort CSV; the bundled synthetic cohort when absent.
    pub cohort: Option<PathBuf>,
    pub pi1: f64,
    pub alpha: f64,
    pub theta_star: f64,
    pub impute_mode: bool,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            dgp: DgpKind::Gaussian,
            replications: 1000,
            seed: DEFAULT_SEED,
            tests: ["pr", "pr_adj", "cr", "cr_adj"].map(String::from).to_vec(),
            ns: vec![500],
            thetas: vec![0.3],
            lambdas: vec![0.0],
            lambda_mode: LambdaMode::Absolute,
            b: 0.0,
            tau_tilde: None,
            rho: 0.33,
            cohort: None,
            pi1: 0.5,
            alpha: 0.025,
            theta_star: 0.0,
            impute_mode: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivityConfig {
    pub data: Option<PathBuf>,
    pub method: String,
    /// Summary-statistic input, used when `data` is absent.
    pub estimate: Option<f64>,
    pub sigma: Option<f64>,
    pub n: Option<usize>,
    pub lambdas: Vec<f64>,
    pub pi1: f64,
    pub alpha: f64,
    pub theta_star: f64,
    pub impute_mode: bool,
}

impl Default for SensitivityConfig {
    fn default() -> Self {
        Self {
            data: None,
            method: "cr".into(),
            estimate: None,
            sigma: None,
            n: None,
            lambdas: vec![0.0, -0.05, -0.1, -0.15, -0.2, -0.25, -0.3],
            pi1: 0.5,
            alpha: 0.025,
            theta_star: 0.0,
            impute_mode: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flags_override_file_over_defaults() {
        let file = object(json!({"alpha": 0.05, "n": 100}), "t").unwrap();
        let flags = object(json!({"n": 200}), "t").unwrap();
        let cfg: PowerConfig = resolve("power", Some(file), flags).unwrap();
        assert_eq!(cfg.alpha, 0.05);
        assert_eq!(cfg.n, 200);
        assert_eq!(cfg.theta_step, 0.01);
    }

    #[test]
    fn unknown_keys_are_config_errors() {
        let file = object(json!({"alpah": 0.05}), "t").unwrap();
        let err = resolve::<PowerConfig>("power", Some(file), Map::new()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let flags = object(json!({"seed": 3}), "t").unwrap();
        let err = resolve::<PowerConfig>("power", None, flags).unwrap_err();
        assert!(err.to_string().contains("--seed"), "{err}");
    }

    #[test]
    fn wrong_types_are_config_errors() {
        let file = object(json!({"n": "many"}), "t").unwrap();
        assert_eq!(resolve::<PowerConfig>("power", Some(file), Map::new()).unwrap_err().exit_code(), 2);
    }
}
