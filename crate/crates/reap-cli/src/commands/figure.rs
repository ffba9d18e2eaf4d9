//! `figure`: canned experiment reproductions, emitted as CSV data files.

use std::path::Path;

use reap_core::discrete::{solve_complete, solve_incomplete, utility};

use crate::commands::sweep::{
    budget_rows, k_rows, lambda_grid_rows, LAMBDA_GRID_HEADER, REGIME_HEADER,
};
use crate::config::{ExperimentConfig, RegimeSpec, TypeEntry, TypesSpec};
use crate::error::CliError;
use crate::output::{fmt_f64, write_csv};
use crate::Format;

/// Three-type instance behind the ratio surface: 300 users with
/// preferences 1, 2, 3, budget 1000.
fn ratio_surface_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::table_defaults(RegimeSpec::Incomplete);
    cfg.n = 300;
    cfg.types = TypesSpec::List(
        [1.0, 2.0, 3.0]
            .iter()
            .map(|&theta| TypeEntry {
                theta,
                lambda: 100.0,
            })
            .collect(),
    );
    cfg
}

fn fig2(out_dir: &Path) -> Result<(String, usize), CliError> {
    let cfg = ratio_surface_config();
    let rows = lambda_grid_rows(&cfg, 50.0, 10.0)?;
    let path = out_dir.join("fig2_ratio_surface.csv");
    let n = rows.len();
    write_csv(&path, &LAMBDA_GRID_HEADER, &rows)?;
    Ok((path.display().to_string(), n))
}

fn fig3(out_dir: &Path) -> Result<(String, usize), CliError> {
    let cfg = ExperimentConfig::table_defaults(RegimeSpec::Incomplete);
    let scenario = cfg.discrete_scenario()?;
    let complete = solve_complete(&scenario);
    let incomplete = solve_incomplete(&scenario);
    let rows: Vec<Vec<String>> = scenario
        .types()
        .iter()
        .enumerate()
        .map(|(i, t)| {
            vec![
                (i + 1).to_string(),
                fmt_f64(t.theta),
                fmt_f64(complete.items[i].epsilon),
                fmt_f64(incomplete.items[i].epsilon),
            ]
        })
        .collect();
    let path = out_dir.join("fig3_epsilons.csv");
    let n = rows.len();
    write_csv(
        &path,
        &["type_index", "theta", "epsilon_complete", "epsilon_incomplete"],
        &rows,
    )?;
    Ok((path.display().to_string(), n))
}

fn fig4(out_dir: &Path) -> Result<(String, usize), CliError> {
    let cfg = ExperimentConfig::table_defaults(RegimeSpec::Incomplete);
    let scenario = cfg.discrete_scenario()?;
    let menu = solve_incomplete(&scenario);
    // 1-based indices of the probed types.
    let probes = [5usize, 10, 15];
    let thetas: Vec<f64> = probes
        .iter()
        .map(|&i| scenario.types()[i - 1].theta)
        .collect();
    let rows: Vec<Vec<String>> = menu
        .items
        .iter()
        .enumerate()
        .map(|(j, item)| {
            let mut row = vec![(j + 1).to_string()];
            row.extend(thetas.iter().map(|&t| fmt_f64(utility(item, t))));
            row
        })
        .collect();
    let path = out_dir.join("fig4_utilities.csv");
    let n = rows.len();
    write_csv(
        &path,
        &["item_index", "utility_type5", "utility_type10", "utility_type15"],
        &rows,
    )?;
    Ok((path.display().to_string(), n))
}

fn fig5(out_dir: &Path) -> Result<(String, usize), CliError> {
    let cfg = ExperimentConfig::table_defaults(RegimeSpec::Incomplete);
    let rows = budget_rows(&cfg, 500.0, 1000.0, 6)?;
    let path = out_dir.join("fig5_budget.csv");
    let n = rows.len();
    write_csv(&path, &REGIME_HEADER, &rows)?;
    Ok((path.display().to_string(), n))
}

fn fig6(out_dir: &Path) -> Result<(String, usize), CliError> {
    let cfg = ExperimentConfig::table_defaults(RegimeSpec::Incomplete);
    let rows = k_rows(&cfg, 5, 20, 4)?;
    let path = out_dir.join("fig6_types.csv");
    let n = rows.len();
    write_csv(&path, &REGIME_HEADER, &rows)?;
    Ok((path.display().to_string(), n))
}

pub fn run(id: &str, out_dir: &Path, format: Format) -> Result<(), CliError> {
    let (path, rows) = match id {
        "fig2" => fig2(out_dir)?,
        "fig3" => fig3(out_dir)?,
        "fig4" => fig4(out_dir)?,
        "fig5" => fig5(out_dir)?,
        "fig6" => fig6(out_dir)?,
        other => {
            return Err(CliError::Validation(format!(
                "unknown figure '{other}' (expected fig2..fig6)"
            )))
        }
    };
    match format {
        Format::Json => println!("{{\n  \"rows\": {rows},\n  \"path\": {path:?}\n}}"),
        Format::Csv => println!("{rows} rows written to {path}"),
    }
    Ok(())
}
