use std::path::Path;
use std::process::Command;

use clap::Parser;
use crossover::io::{read_cohort_csv, read_trial_csv, write_cohort_csv, write_trial_csv};
use crossover::{execute, Cli, CliError};
use crossover_core::simulation::{synthetic_cohort, SYNTHETIC_COHORT_SEED};
use crossover_core::theta_cr;
use serde_json::Value;

const HAND: &str = "arm,y1,y2\n1,3,1\n0,1,0\n1,5,1\n0,0,1\n";

fn run(args: &[&str]) -> Result<crossover::Output, CliError> {
    let mut argv = vec!["crossover"];
    argv.extend_from_slice(args);
    execute(&Cli::try_parse_from(argv).expect("arguments parse"))
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&run(args).unwrap().primary).unwrap()
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn hand_csv_matches_hand_arithmetic() {
    let table = read_trial_csv(HAND.as_bytes(), "hand", 0.5, false).unwrap();
    assert_eq!(theta_cr(&table.data).unwrap().estimate, 1.5);

    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "hand.csv", HAND);
    let out = json(&["estimate", "--data", &data, "--methods", "cr"]);
    let cr = &out["results"][0];
    assert_eq!(cr["estimate"].as_f64(), Some(1.5));
    assert!((cr["standard_error"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    assert!((cr["statistic"].as_f64().unwrap() - 2.121_320_343_559_642).abs() < 1e-12);
    assert_eq!(cr["reject"], Value::Bool(true));
    assert_eq!(out["config"]["methods"][0], "cr");
}

#[test]
fn null_dataset_has_no_rejections() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "zero.csv", "arm,y1,y2,x_a\n1,0,0,1\n0,0,0,2\n1,0,0,3\n0,0,0,1\n1,0,0,2\n0,0,0,3\n1,0,0,1\n0,0,0,2\n");
    let out = json(&["estimate", "--data", &data, "--methods", "cr,cr_alt,pr"]);
    for r in out["results"].as_array().unwrap() {
        assert_eq!(r["estimate"].as_f64(), Some(0.0));
        assert_eq!(r["reject"], Value::Bool(false));
        assert_eq!(r["degenerate_variance"], Value::Bool(true));
    }
}

#[test]
fn balanced_covariate_leaves_estimate_unchanged() {
    // covariate has the same mean in both arms and no link to the deltas
    let csv = "arm,y1,y2,x_a\n1,3,1,-1\n1,5,1,1\n1,4,2,0\n0,1,0,-1\n0,0,1,1\n0,2,1,0\n";
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "bal.csv", csv);
    let out = json(&["estimate", "--data", &data, "--methods", "cr,cr_adj"]);
    let cr = out["results"][0]["estimate"].as_f64().unwrap();
    let adj = out["results"][1]["estimate"].as_f64().unwrap();
    assert!((cr - adj).abs() < 1e-12, "{cr} {adj}");
}

#[test]
fn parse_errors_name_the_line() {
    let bad = "arm,y1,y2\n1,3,1\n2,1,0\n1,5,1\n0,0,1\n";
    match read_trial_csv(bad.as_bytes(), "bad", 0.5, false) {
        Err(CliError::Parse { line, message, .. }) => {
            assert_eq!(line, 3);
            assert!(message.contains("arm"), "{message}");
        }
        other => panic!("{other:?}"),
    }
    let missing = "arm,y1,y2\n1,3,1\n0,,0\n1,5,1\n0,0,1\n";
    assert!(matches!(read_trial_csv(missing.as_bytes(), "m", 0.5, false), Err(CliError::Parse { line: 3, .. })));
    let text = "arm,y1,y2\n1,3,1\n0,abc,0\n1,5,1\n0,0,1\n";
    assert!(matches!(read_trial_csv(text.as_bytes(), "t", 0.5, false), Err(CliError::Parse { line: 3, .. })));
    let short = "arm,y1,y2\n1,3,1\n0,1,0\n1,5,1\n";
    assert_eq!(read_trial_csv(short.as_bytes(), "s", 0.5, false).unwrap_err().exit_code(), 3);
    let extra = "arm,y1,y2,z\n1,3,1,0\n0,1,0,0\n1,5,1,0\n0,0,1,0\n";
    assert!(matches!(read_trial_csv(extra.as_bytes(), "e", 0.5, false), Err(CliError::Parse { line: 1, .. })));
}

#[test]
fn missing_covariates_need_impute_mode() {
    let csv = "arm,y1,y2,x_a\n1,3,1,2\n0,1,0,\n1,5,1,2\n0,0,1,7\n";
    assert!(matches!(read_trial_csv(csv.as_bytes(), "c", 0.5, false), Err(CliError::Parse { line: 3, .. })));
    let table = read_trial_csv(csv.as_bytes(), "c", 0.5, true).unwrap();
    assert_eq!(table.data.covariates().column(0), vec![2.0, 2.0, 2.0, 7.0]);
}

#[test]
fn trial_csv_round_trip() {
    let csv = "id,arm,y1,y2,x_age,x_flag\na,1,3.25,1,30,0\nb,0,1e-3,0,41,1\nc,1,5,-1.5,22,1\nd,0,0,1,0.1,0\n";
    let table = read_trial_csv(csv.as_bytes(), "r", 0.5, false).unwrap();
    let mut buf = Vec::new();
    write_trial_csv(&mut buf, &table).unwrap();
    let again = read_trial_csv(buf.as_slice(), "r2", 0.5, false).unwrap();
    assert_eq!(table, again);
    assert_eq!(again.covariate_names, vec!["age", "flag"]);
}

#[test]
fn cohort_csv_round_trip_and_imputation() {
    let cohort = synthetic_cohort(SYNTHETIC_COHORT_SEED);
    let mut buf = Vec::new();
    write_cohort_csv(&mut buf, &cohort).unwrap();
    assert_eq!(read_cohort_csv(buf.as_slice(), "c", false).unwrap(), cohort);

    let holes = "y0,x_age,x_flag\n1,20,1\n0,,0\n0,20,\n1,30,1\n";
    assert!(read_cohort_csv(holes.as_bytes(), "h", false).is_err());
    let filled = read_cohort_csv(holes.as_bytes(), "h", true).unwrap();
    assert_eq!(filled.covariates().column(0), vec![20.0, 20.0, 20.0, 30.0]);
    assert_eq!(filled.covariates().column(1), vec![1.0, 0.0, 0.0, 1.0]);
}

#[test]
fn power_grid_spot_values() {
    let out = run(&["power"]).unwrap().primary;
    let find = |prefix: &str| -> f64 {
        let line = out.lines().find(|l| l.starts_with(prefix)).unwrap_or_else(|| panic!("{prefix}"));
        line.rsplit(',').next().unwrap().parse().unwrap()
    };
    assert!((find("0,0,0,cr,") - 0.025).abs() < 1e-12);
    assert!((find("0.3,0.1,0,cr,") - 0.7330).abs() < 1e-4);
    // crossing of cr and pr at λ = 0.1, b = 0 lies at θ = 0.1/(1 − √3/4) ≈ 0.176
    assert!(find("0.17,0.1,0,cr,") < find("0.17,0.1,0,pr,"));
    assert!(find("0.18,0.1,0,cr,") > find("0.18,0.1,0,pr,"));
    assert!((find("0.2,0.1,0,cr,") - 0.251_757_455_654).abs() < 1e-9);
    assert!((find("0.2,0.1,0,pr,") - 0.199_913_569_569).abs() < 1e-9);
    assert_eq!(out.lines().count(), 1 + 51 * 4 * 2 * 3);
}

#[test]
fn samplesize_outputs() {
    let out = json(&["samplesize", "--theta", "0.3", "--sigma2-cr", "3", "--sigma2-pr", "16"]);
    assert_eq!(out["n_cr_carryover"].as_u64(), Some(351));
    let out = json(&["samplesize", "--theta", "0.3", "--rho", "0.3"]);
    let ratio = out["exact"]["n_cr"].as_f64().unwrap() / out["exact"]["n_pr"].as_f64().unwrap();
    assert!((ratio - 0.35).abs() < 1e-12);
    let err = run(&["samplesize", "--theta", "0.3", "--rho", "0.3", "--lambda-sum", "0.6"]).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("not positive"), "{err}");
}

#[test]
fn sensitivity_brackets_the_tipping_point() {
    let sigma = 3f64.sqrt().to_string();
    let base = ["sensitivity", "--estimate", "0.3", "--sigma", &sigma, "--n", "500"];
    let tip = json(&base)["tipping_point"].as_f64().unwrap();
    assert!((tip - (-0.1482)).abs() < 1e-4);
    let grid = format!("0,{},{}", tip + 1e-6, tip - 1e-6);
    let mut args = base.to_vec();
    args.extend(["--lambdas", &grid]);
    let out = json(&args);
    let decisions: Vec<bool> =
        out["decisions"].as_array().unwrap().iter().map(|d| d["reject"].as_bool().unwrap()).collect();
    assert_eq!(decisions, vec![true, true, false]);

    let out = json(&["sensitivity", "--estimate", "-0.1", "--sigma", &sigma, "--n", "500"]);
    assert!(out["tipping_point"].as_f64().unwrap() > 0.0);
    assert!(out["note"].as_str().unwrap().contains("positive"));
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", r#"{"theta": 0.3, "sigma2_cr": 3.0, "sigma2_pr": 16.0, "beta": 0.2}"#);
    let out = json(&["--config", &cfg, "samplesize", "--beta", "0.1"]);
    assert_eq!(out["config"]["beta"].as_f64(), Some(0.1));
    assert_eq!(out["n_cr"].as_u64(), Some(351));
    let bad = write(dir.path(), "bad.json", r#"{"thetaa": 0.3}"#);
    assert_eq!(run(&["--config", &bad, "samplesize"]).unwrap_err().exit_code(), 2);
}

#[test]
fn embedded_config_reproduces_output() {
    let dir = tempfile::tempdir().unwrap();
    let first = run(&["simulate", "--replications", "50", "--ns", "60", "--thetas", "0.3,0.5", "--seed", "11"]).unwrap();
    let value: Value = serde_json::from_str(&first.primary).unwrap();
    let cfg = write(dir.path(), "cfg.json", &value["config"].to_string());
    let again = run(&["--config", &cfg, "simulate"]).unwrap();
    assert_eq!(first.primary, again.primary);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_crossover");
    let dir = tempfile::tempdir().unwrap();
    let hand = write(dir.path(), "hand.csv", HAND);
    let bad = write(dir.path(), "bad.csv", "arm,y1,y2\n1,3,1\n2,1,0\n1,5,1\n0,0,1\n");
    let out_path = dir.path().join("out.json");
    let code = |args: &[&str]| Command::new(bin).args(args).env("RUST_LOG", "off").output().unwrap().status.code();

    assert_eq!(code(&["estimate", "--data", &hand, "--out", out_path.to_str().unwrap()]), Some(4));
    assert_eq!(code(&["estimate", "--data", &hand, "--methods", "cr", "--out", out_path.to_str().unwrap()]), Some(0));
    assert!(std::fs::read_to_string(&out_path).unwrap().contains("\"estimate\""));
    assert_eq!(code(&["estimate", "--data", &bad]), Some(3));
    assert_eq!(code(&["estimate", "--data", &hand, "--alpha", "2"]), Some(2));
    assert_eq!(code(&["power", "--theta-step", "-1"]), Some(2));
    assert_eq!(code(&["estimate"]), Some(2));
    assert_eq!(code(&["nonsense"]), Some(2));
    let one_arm = write(dir.path(), "one.csv", "arm,y1,y2\n1,3,1\n1,1,0\n1,5,1\n1,0,1\n");
    assert_eq!(code(&["estimate", "--data", &one_arm, "--methods", "cr"]), Some(3));
}
