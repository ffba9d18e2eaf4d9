//! `sweep`: one-parameter families of instances, summarized as CSV.

use std::path::Path;

use reap_core::discrete::{DiscreteScenario, PuType};

use crate::commands::summarize_regimes;
use crate::config::{ExperimentConfig, SweepSpec, TypesSpec};
use crate::error::CliError;
use crate::output::{fmt_f64, write_csv};
use crate::Format;

pub const REGIME_HEADER: [&str; 6] = [
    "value",
    "alpha_complete",
    "alpha_incomplete",
    "ratio",
    "objective_complete",
    "objective_incomplete",
];

fn summary_row(value: f64, scenario: &DiscreteScenario) -> Vec<String> {
    let s = summarize_regimes(scenario);
    vec![
        fmt_f64(value),
        fmt_f64(s.alpha_complete),
        fmt_f64(s.alpha_incomplete),
        fmt_f64(s.ratio),
        fmt_f64(s.objective_complete),
        fmt_f64(s.objective_incomplete),
    ]
}

/// Budget sweep rows over `steps` evenly spaced budgets, endpoints included.
pub fn budget_rows(
    config: &ExperimentConfig,
    start: f64,
    end: f64,
    steps: usize,
) -> Result<Vec<Vec<String>>, CliError> {
    if steps < 2 {
        return Err(CliError::Validation("sweep.steps must be >= 2".into()));
    }
    let base = config.discrete_scenario()?;
    (0..steps)
        .map(|i| {
            let b = start + (end - start) * i as f64 / (steps - 1) as f64;
            let scenario = base
                .with_budget(b)
                .map_err(|e| CliError::Validation(format!("budget {b}: {e}")))?;
            Ok(summary_row(b, &scenario))
        })
        .collect()
}

/// Type-count sweep: `steps` evenly spaced k values on the uniform range.
pub fn k_rows(
    config: &ExperimentConfig,
    start: usize,
    end: usize,
    steps: usize,
) -> Result<Vec<Vec<String>>, CliError> {
    let TypesSpec::Uniform {
        theta_low,
        theta_high,
        ..
    } = config.types
    else {
        return Err(CliError::Validation(
            "a k sweep requires a uniform types spec".into(),
        ));
    };
    if steps < 2 || end <= start {
        return Err(CliError::Validation(
            "sweep over k needs steps >= 2 and end > start".into(),
        ));
    }
    (0..steps)
        .map(|i| {
            let k = (start as f64
                + (end - start) as f64 * i as f64 / (steps - 1) as f64)
                .round() as usize;
            let mut cfg = config.clone();
            cfg.types = TypesSpec::Uniform {
                theta_low,
                theta_high,
                k,
            };
            let scenario = cfg.discrete_scenario()?;
            Ok(summary_row(k as f64, &scenario))
        })
        .collect()
}

pub const LAMBDA_GRID_HEADER: [&str; 6] = [
    "lambda1",
    "lambda2",
    "lambda3",
    "alpha_complete",
    "alpha_incomplete",
    "ratio",
];

/// Ratio surface over population splits of a three-type instance:
/// `lambda1` and `lambda2` step over their grids, `lambda3` absorbs the rest.
pub fn lambda_grid_rows(
    config: &ExperimentConfig,
    lambda1_step: f64,
    lambda2_step: f64,
) -> Result<Vec<Vec<String>>, CliError> {
    let TypesSpec::List(entries) = &config.types else {
        return Err(CliError::Validation(
            "a lambda-grid sweep requires an explicit list of 3 types".into(),
        ));
    };
    if entries.len() != 3 {
        return Err(CliError::Validation(format!(
            "a lambda-grid sweep requires exactly 3 types, got {}",
            entries.len()
        )));
    }
    if !(lambda1_step > 0.0) || !(lambda2_step > 0.0) {
        return Err(CliError::Validation("lambda steps must be positive".into()));
    }
    let n = config.n as f64;
    let mut rows = Vec::new();
    let mut i = 0usize;
    loop {
        let l1 = i as f64 * lambda1_step;
        if l1 > n + 1e-9 {
            break;
        }
        let mut j = 0usize;
        loop {
            let l2 = j as f64 * lambda2_step;
            if l1 + l2 > n + 1e-9 {
                break;
            }
            let l3 = (n - l1 - l2).max(0.0);
            let lambdas = [l1, l2, l3];
            if lambdas.iter().all(|&l| l == 0.0) {
                j += 1;
                continue;
            }
            let types: Result<Vec<PuType>, _> = entries
                .iter()
                .zip(lambdas)
                .map(|(t, l)| PuType::new(t.theta, l))
                .collect();
            let scenario = DiscreteScenario::new(
                config.budget,
                types.map_err(|e| CliError::Validation(e.to_string()))?,
                config.gamma,
                config.delta,
            )
            .map_err(|e| CliError::Validation(e.to_string()))?;
            let s = summarize_regimes(&scenario);
            rows.push(vec![
                fmt_f64(l1),
                fmt_f64(l2),
                fmt_f64(l3),
                fmt_f64(s.alpha_complete),
                fmt_f64(s.alpha_incomplete),
                fmt_f64(s.ratio),
            ]);
            j += 1;
        }
        i += 1;
    }
    Ok(rows)
}

pub fn run(config: &ExperimentConfig, out_dir: &Path, format: Format) -> Result<(), CliError> {
    let spec = config
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Validation("config has no sweep section".into()))?;
    let (header, rows): (&[&str], Vec<Vec<String>>) = match *spec {
        SweepSpec::Budget { start, end, steps } => {
            (&REGIME_HEADER, budget_rows(config, start, end, steps)?)
        }
        SweepSpec::K { start, end, steps } => (&REGIME_HEADER, k_rows(config, start, end, steps)?),
        SweepSpec::LambdaGrid {
            lambda1_step,
            lambda2_step,
        } => (
            &LAMBDA_GRID_HEADER,
            lambda_grid_rows(config, lambda1_step, lambda2_step)?,
        ),
    };
    let path = out_dir.join("sweep.csv");
    write_csv(&path, header, &rows)?;
    match format {
        Format::Json => {
            println!("{{\n  \"rows\": {},\n  \"path\": {:?}\n}}", rows.len(), path);
        }
        Format::Csv => println!("{} rows written to {}", rows.len(), path.display()),
    }
    Ok(())
}
