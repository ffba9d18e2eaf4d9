//! `simulate`: Monte Carlo rounds against the designed menu.
//!
//! Writes one CSV row per trial plus a JSON summary; all randomness flows
//! from the configured seed, so re-runs are byte-identical.

use std::path::Path;

use reap_core::discrete::{solve_complete, solve_incomplete};
use reap_core::sim::{
    build_population, build_population_continuous, predicted_alpha_continuous,
    predicted_alpha_discrete, simulate_trials, simulate_trials_continuous, summarize_trials,
    MonteCarloReport, RawDistribution, RoundResult,
};
use serde::Serialize;

use crate::config::{ExperimentConfig, RegimeSpec};
use crate::error::CliError;
use crate::output::{fmt_f64, write_csv, write_json};
use crate::Format;

#[derive(Serialize)]
struct ReportDocument {
    trials: usize,
    predicted_alpha: f64,
    violation_rate: f64,
    allowed_violation_rate: f64,
    mean_abs_error: f64,
    error_quantiles: Vec<(f64, f64)>,
}

impl ReportDocument {
    fn new(report: &MonteCarloReport, delta: f64) -> Self {
        Self {
            trials: report.trials,
            predicted_alpha: report.predicted_alpha,
            violation_rate: report.violation_rate,
            allowed_violation_rate: 1.0 - delta,
            mean_abs_error: report.mean_abs_error,
            error_quantiles: report.error_quantiles.clone(),
        }
    }
}

fn trial_rows(rounds: &[RoundResult]) -> Vec<Vec<String>> {
    rounds
        .iter()
        .enumerate()
        .map(|(t, r)| {
            vec![
                t.to_string(),
                fmt_f64(r.s_true),
                fmt_f64(r.s_hat),
                fmt_f64(r.abs_error),
                fmt_f64(r.total_payment),
            ]
        })
        .collect()
}

pub fn run(
    config: &ExperimentConfig,
    seed: u64,
    out_dir: &Path,
    format: Format,
) -> Result<(), CliError> {
    if config.trials == 0 {
        return Err(CliError::Validation("trials must be >= 1".into()));
    }
    let raw = RawDistribution::Uniform {
        low: 0.0,
        high: config.gamma,
    };
    let (alpha, rounds) = match config.regime {
        RegimeSpec::Complete | RegimeSpec::Incomplete => {
            let scenario = config.discrete_scenario()?;
            let menu = match config.regime {
                RegimeSpec::Complete => solve_complete(&scenario),
                _ => solve_incomplete(&scenario),
            };
            let agents = build_population(&scenario, &raw, seed)
                .map_err(|e| CliError::Validation(format!("population: {e}")))?;
            let alpha = predicted_alpha_discrete(&agents, &menu, &scenario);
            let rounds = simulate_trials(&agents, &menu, &scenario, config.trials, seed);
            (alpha, rounds)
        }
        RegimeSpec::Continuous => {
            let scenario = config.continuous_scenario()?;
            let menu = reap_core::continuous::solve_continuous(&scenario, 1024)
                .map_err(|e| CliError::Internal(format!("continuous solve: {e}")))?;
            let agents = build_population_continuous(&scenario, &raw, seed);
            let alpha = predicted_alpha_continuous(&agents, &menu, scenario.ctx())
                .map_err(|e| CliError::Internal(e.to_string()))?;
            let rounds =
                simulate_trials_continuous(&agents, &menu, config.gamma, config.trials, seed)
                    .map_err(|e| CliError::Internal(e.to_string()))?;
            (alpha, rounds)
        }
    };

    let report = summarize_trials(alpha, &rounds);
    write_csv(
        &out_dir.join("trials.csv"),
        &["trial", "s_true", "s_hat", "abs_error", "total_payment"],
        &trial_rows(&rounds),
    )?;
    let doc = ReportDocument::new(&report, config.delta);
    write_json(&out_dir.join("report.json"), &doc)?;

    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&doc)
                .map_err(|e| CliError::Internal(format!("serialize: {e}")))?
        ),
        Format::Csv => {
            println!("trials: {}", doc.trials);
            println!("predicted alpha: {}", fmt_f64(doc.predicted_alpha));
            println!(
                "violation rate: {} (allowed {})",
                fmt_f64(doc.violation_rate),
                fmt_f64(doc.allowed_violation_rate)
            );
            println!("mean abs error: {}", fmt_f64(doc.mean_abs_error));
        }
    }
    Ok(())
}
