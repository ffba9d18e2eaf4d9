//! `design`: solve the configured instance and emit the menu document.

use std::path::Path;

use reap_core::continuous::{objective_continuous, solve_continuous, total_spend};
use reap_core::discrete::{alpha_of_menu, objective_value, solve_complete, solve_incomplete};
use serde::Serialize;

use crate::config::{ExperimentConfig, RegimeSpec};
use crate::error::CliError;
use crate::menu_io::{ContinuousMenuDocument, MenuDocument};
use crate::output::{fmt_f64, write_json};
use crate::Format;

/// Grid-refinement cap for the continuous solver.
const CONTINUOUS_GRID_CAP: usize = 1024;

#[derive(Serialize)]
struct DesignSummary {
    regime: String,
    alpha: f64,
    objective: f64,
    menu_path: String,
}

#[derive(Serialize)]
struct ContinuousDesignSummary {
    regime: String,
    objective: f64,
    total_spend: f64,
    menu_path: String,
}

pub fn run(config: &ExperimentConfig, out_dir: &Path, format: Format) -> Result<(), CliError> {
    match config.regime {
        RegimeSpec::Complete | RegimeSpec::Incomplete => {
            let scenario = config.discrete_scenario()?;
            let menu = match config.regime {
                RegimeSpec::Complete => solve_complete(&scenario),
                _ => solve_incomplete(&scenario),
            };
            let doc = MenuDocument::from_menu(&menu, &scenario);
            let path = out_dir.join("menu.json");
            write_json(&path, &doc)?;
            let summary = DesignSummary {
                regime: doc.regime.clone(),
                alpha: alpha_of_menu(&menu, &scenario),
                objective: objective_value(&menu, &scenario),
                menu_path: path.display().to_string(),
            };
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&summary)
                        .map_err(|e| CliError::Internal(format!("serialize: {e}")))?
                ),
                Format::Csv => {
                    println!("regime: {}", summary.regime);
                    println!("alpha: {}", fmt_f64(summary.alpha));
                    println!("objective: {}", fmt_f64(summary.objective));
                    println!("menu written to {}", summary.menu_path);
                }
            }
            Ok(())
        }
        RegimeSpec::Continuous => {
            let scenario = config.continuous_scenario()?;
            let menu = solve_continuous(&scenario, CONTINUOUS_GRID_CAP)
                .map_err(|e| CliError::Internal(format!("continuous solve: {e}")))?;
            let doc = ContinuousMenuDocument::from_menu(&menu, scenario.budget());
            let path = out_dir.join("continuous_menu.json");
            write_json(&path, &doc)?;
            let summary = ContinuousDesignSummary {
                regime: "continuous".into(),
                objective: objective_continuous(&menu, &scenario),
                total_spend: total_spend(&menu, &scenario),
                menu_path: path.display().to_string(),
            };
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&summary)
                        .map_err(|e| CliError::Internal(format!("serialize: {e}")))?
                ),
                Format::Csv => {
                    println!("regime: continuous");
                    println!("objective: {}", fmt_f64(summary.objective));
                    println!("total spend: {}", fmt_f64(summary.total_spend));
                    println!("menu written to {}", summary.menu_path);
                }
            }
            Ok(())
        }
    }
}
