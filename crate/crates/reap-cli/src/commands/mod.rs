pub mod design;
pub mod figure;
pub mod simulate;
pub mod sweep;
pub mod verify;

use std::path::Path;

use reap_core::discrete::{
    alpha_of_menu, objective_value, solve_complete, solve_incomplete, DiscreteScenario,
};

/// Both regimes' accuracy and objective for one scenario.
pub struct RegimeSummary {
    pub alpha_complete: f64,
    pub alpha_incomplete: f64,
    pub ratio: f64,
    pub objective_complete: f64,
    pub objective_incomplete: f64,
}

pub fn summarize_regimes(scenario: &DiscreteScenario) -> RegimeSummary {
    let mc = solve_complete(scenario);
    let mi = solve_incomplete(scenario);
    let alpha_complete = alpha_of_menu(&mc, scenario);
    let alpha_incomplete = alpha_of_menu(&mi, scenario);
    RegimeSummary {
        alpha_complete,
        alpha_incomplete,
        ratio: alpha_incomplete / alpha_complete,
        objective_complete: objective_value(&mc, scenario),
        objective_incomplete: objective_value(&mi, scenario),
    }
}

pub fn join(dir: &Path, name: &str) -> std::path::PathBuf {
    dir.join(name)
}
