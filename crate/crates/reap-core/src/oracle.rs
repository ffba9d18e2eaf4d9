//! Brute-force re-derivation of optimal menus on small instances.
//!
//! The searches here deliberately avoid the closed forms: they operate on
//! the raw inequality-constrained problems and are used by tests to confirm
//! that the analytic menus are optimal and that the constraint reductions
//! (top-IR equality, adjacent-IC equalities, monotonicity) emerge on their
//! own from the search.

use alloc::vec;
use alloc::vec::Vec;

use crate::discrete::{
    pooled_incomplete_weights, objective_value, ContractItem, ContractMenu,
    DiscreteScenario, Regime,
};
use crate::rng::SeededStream;
use crate::{Error, Result};

/// Grid search configuration.
#[derive(Debug, Clone, Copy)]
pub struct OracleSettings {
    pub grid_points_per_dim: usize,
    pub refinement_rounds: usize,
    pub feasibility_tol: f64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            grid_points_per_dim: 200,
            refinement_rounds: 3,
            feasibility_tol: 1e-7,
        }
    }
}

impl OracleSettings {
    fn validate(&self) -> Result<()> {
        if self.grid_points_per_dim < 2 {
            return Err(Error::OutOfRange {
                field: "grid_points_per_dim",
                value: self.grid_points_per_dim as f64,
            });
        }
        if self.refinement_rounds == 0 {
            return Err(Error::OutOfRange {
                field: "refinement_rounds",
                value: 0.0,
            });
        }
        if !(self.feasibility_tol > 0.0) {
            return Err(Error::NonPositive {
                field: "feasibility_tol",
                value: self.feasibility_tol,
            });
        }
        Ok(())
    }
}

/// A constraint found tight at the search incumbent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActiveConstraint {
    Budget,
    /// IR of the given type index.
    Ir(usize),
    /// IC of type `i` toward item `i + 1`.
    IcAdjacent(usize),
}

/// Outcome of a brute-force search.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub menu: ContractMenu,
    pub objective: f64,
    pub feasible: bool,
    pub active_constraints: Vec<ActiveConstraint>,
}

fn ensure_small(scenario: &DiscreteScenario) -> Result<()> {
    if scenario.k() > 3 {
        return Err(Error::OutOfRange {
            field: "k",
            value: scenario.k() as f64,
        });
    }
    Ok(())
}

/// Upper bound on each epsilon implied by IR plus the budget alone:
/// `lambda_i p_i <= B` and `p_i >= theta_i eps_i` give `eps_i <= B/(lambda_i theta_i)`.
fn epsilon_caps(scenario: &DiscreteScenario) -> Vec<f64> {
    scenario
        .types()
        .iter()
        .map(|t| scenario.budget() / (t.lambda * t.theta))
        .collect()
}

/// Visit every point of the axis grid defined by `windows`, in
/// lexicographic order (which makes the `<` incumbent update a
/// deterministic smallest-tuple tie-break).
fn for_each_grid_point(
    windows: &[(f64, f64)],
    points: usize,
    mut visit: impl FnMut(&[f64]),
) {
    let k = windows.len();
    let mut idx = vec![0usize; k];
    let mut eps = vec![0.0f64; k];
    loop {
        for d in 0..k {
            let (lo, hi) = windows[d];
            eps[d] = lo + (hi - lo) * idx[d] as f64 / (points - 1) as f64;
        }
        visit(&eps);
        let mut d = k;
        loop {
            if d == 0 {
                return;
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < points {
                break;
            }
            idx[d] = 0;
        }
    }
}

fn shrink_windows(windows: &mut [(f64, f64)], center: &[f64], factor: f64) {
    for (w, &c) in windows.iter_mut().zip(center) {
        let half = (w.1 - w.0) / (2.0 * factor);
        let lo = (c - half).max(w.0.min(c) * 1e-6).max(f64::MIN_POSITIVE);
        w.0 = lo.max(1e-12 * c.max(1.0));
        w.1 = c + half;
    }
}

/// Tight-IR payments: `p_i = theta_i eps_i`.
fn payments_tight_ir(scenario: &DiscreteScenario, eps: &[f64]) -> Vec<f64> {
    scenario
        .types()
        .iter()
        .zip(eps)
        .map(|(t, &e)| t.theta * e)
        .collect()
}

/// Payments from the binding adjacent-IC chain with top IR tight:
/// `p_k = theta_k eps_k`, `p_i = p_{i+1} - theta_i (eps_{i+1} - eps_i)`.
fn payments_ic_chain(scenario: &DiscreteScenario, eps: &[f64]) -> Vec<f64> {
    let types = scenario.types();
    let k = types.len();
    let mut p = vec![0.0; k];
    p[k - 1] = types[k - 1].theta * eps[k - 1];
    for i in (0..k - 1).rev() {
        p[i] = p[i + 1] - types[i].theta * (eps[i + 1] - eps[i]);
    }
    p
}

fn spend(scenario: &DiscreteScenario, p: &[f64]) -> f64 {
    scenario
        .types()
        .iter()
        .zip(p)
        .map(|(t, &pi)| t.lambda * pi)
        .sum()
}

fn objective(scenario: &DiscreteScenario, eps: &[f64]) -> f64 {
    scenario
        .types()
        .iter()
        .zip(eps)
        .map(|(t, &e)| t.lambda / (e * e))
        .sum()
}

fn menu_from(eps: &[f64], p: &[f64], regime: Regime) -> ContractMenu {
    ContractMenu {
        items: eps
            .iter()
            .zip(p)
            .map(|(&epsilon, &payment)| ContractItem { epsilon, payment })
            .collect(),
        regime,
    }
}

/// Budget and participation only — the complete-information problem has no
/// truthfulness constraints (the center observes every type).
fn ir_budget_feasible(scenario: &DiscreteScenario, eps: &[f64], p: &[f64], tol: f64) -> bool {
    let b = scenario.budget();
    if spend(scenario, p) > b * (1.0 + tol) {
        return false;
    }
    let slack = tol * b.max(1.0);
    scenario
        .types()
        .iter()
        .zip(eps.iter().zip(p))
        .all(|(t, (&e, &pi))| pi - t.theta * e >= -slack)
}

fn full_feasible(scenario: &DiscreteScenario, eps: &[f64], p: &[f64], tol: f64) -> bool {
    let b = scenario.budget();
    if spend(scenario, p) > b * (1.0 + tol) {
        return false;
    }
    let types = scenario.types();
    let slack = tol * b.max(1.0);
    for (i, ti) in types.iter().enumerate() {
        let own = p[i] - ti.theta * eps[i];
        if own < -slack {
            return false;
        }
        for j in 0..types.len() {
            if j != i && p[j] - ti.theta * eps[j] > own + slack {
                return false;
            }
        }
    }
    true
}

fn active_constraints(
    scenario: &DiscreteScenario,
    menu: &ContractMenu,
    tight_tol: f64,
) -> Vec<ActiveConstraint> {
    let mut active = Vec::new();
    let b = scenario.budget();
    let p: Vec<f64> = menu.items.iter().map(|it| it.payment).collect();
    if (b - spend(scenario, &p)).abs() <= tight_tol * b.max(1.0) {
        active.push(ActiveConstraint::Budget);
    }
    let types = scenario.types();
    for (i, t) in types.iter().enumerate() {
        let u = menu.items[i].payment - t.theta * menu.items[i].epsilon;
        if u.abs() <= tight_tol * b.max(1.0) {
            active.push(ActiveConstraint::Ir(i));
        }
    }
    for i in 0..types.len().saturating_sub(1) {
        let own = menu.items[i].payment - types[i].theta * menu.items[i].epsilon;
        let up = menu.items[i + 1].payment - types[i].theta * menu.items[i + 1].epsilon;
        if (own - up).abs() <= tight_tol * b.max(1.0) {
            active.push(ActiveConstraint::IcAdjacent(i));
        }
    }
    active
}

/// Refined grid search for the complete-information optimum.
///
/// Searches the tight-IR slice (`p_i = theta_i eps_i`) under the budget
/// inequality, then scales the incumbent onto the budget hyperplane (a
/// feasible improving move, since the objective decreases in every eps).
pub fn oracle_complete(
    scenario: &DiscreteScenario,
    settings: &OracleSettings,
) -> Result<OracleResult> {
    ensure_small(scenario)?;
    settings.validate()?;
    let g = settings.grid_points_per_dim;
    let caps = epsilon_caps(scenario);
    let mut windows: Vec<(f64, f64)> = caps.iter().map(|&c| (c / g as f64, c)).collect();
    let mut best: Option<(f64, Vec<f64>)> = None;

    for _ in 0..settings.refinement_rounds {
        for_each_grid_point(&windows, g, |eps| {
            let p = payments_tight_ir(scenario, eps);
            if spend(scenario, &p) <= scenario.budget() {
                let obj = objective(scenario, eps);
                if best.as_ref().is_none_or(|(b, _)| obj < *b) {
                    best = Some((obj, eps.to_vec()));
                }
            }
        });
        let Some((_, ref center)) = best else {
            return Err(Error::NoFeasiblePoint);
        };
        let center = center.clone();
        shrink_windows(&mut windows, &center, 5.0);
    }

    let (_, mut eps) = best.ok_or(Error::NoFeasiblePoint)?;
    // Exhaust the budget: uniform scaling keeps IR tight and improves the
    // objective, and its feasibility is re-checked below.
    let p = payments_tight_ir(scenario, &eps);
    let scale = scenario.budget() / spend(scenario, &p);
    if scale > 1.0 {
        for e in &mut eps {
            *e *= scale;
        }
    }
    let p = payments_tight_ir(scenario, &eps);
    let menu = menu_from(&eps, &p, Regime::Complete);
    let feasible = ir_budget_feasible(scenario, &eps, &p, settings.feasibility_tol);
    Ok(OracleResult {
        objective: objective_value(&menu, scenario),
        active_constraints: active_constraints(scenario, &menu, settings.feasibility_tol),
        feasible,
        menu,
    })
}

/// Refined grid search for the incomplete-information optimum.
///
/// Grids monotone non-increasing epsilon tuples, recovers payments from the
/// binding adjacent-IC chain with top IR tight, and filters by the FULL
/// IR + IC + budget inequality set, so a chain tuple only survives if it is
/// genuinely feasible. A final uniform scaling exhausts the budget.
pub fn oracle_incomplete(
    scenario: &DiscreteScenario,
    settings: &OracleSettings,
) -> Result<OracleResult> {
    ensure_small(scenario)?;
    settings.validate()?;
    let g = settings.grid_points_per_dim;
    let caps = epsilon_caps(scenario);
    let mut windows: Vec<(f64, f64)> = caps.iter().map(|&c| (c / g as f64, c)).collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let tol = settings.feasibility_tol;

    for _ in 0..settings.refinement_rounds {
        for_each_grid_point(&windows, g, |eps| {
            if eps.windows(2).any(|w| w[1] > w[0]) {
                return;
            }
            let p = payments_ic_chain(scenario, eps);
            if spend(scenario, &p) <= scenario.budget() && full_feasible(scenario, eps, &p, tol) {
                let obj = objective(scenario, eps);
                if best.as_ref().is_none_or(|(b, _)| obj < *b) {
                    best = Some((obj, eps.to_vec()));
                }
            }
        });
        let Some((_, ref center)) = best else {
            return Err(Error::NoFeasiblePoint);
        };
        let center = center.clone();
        shrink_windows(&mut windows, &center, 5.0);
    }

    let (_, mut eps) = best.ok_or(Error::NoFeasiblePoint)?;
    let p = payments_ic_chain(scenario, &eps);
    let scale = scenario.budget() / spend(scenario, &p);
    if scale > 1.0 {
        for e in &mut eps {
            *e *= scale;
        }
    }
    let p = payments_ic_chain(scenario, &eps);
    let menu = menu_from(&eps, &p, Regime::Incomplete);
    let feasible = full_feasible(scenario, &eps, &p, tol);
    Ok(OracleResult {
        objective: objective_value(&menu, scenario),
        active_constraints: active_constraints(scenario, &menu, tol),
        feasible,
        menu,
    })
}

/// Coarse unrestricted search over `(eps, p)` jointly, with no reliance on
/// the constraint reductions. Used to cross-check the chain-parametrized
/// search; expects agreement only at grid resolution.
pub fn oracle_incomplete_unrestricted(
    scenario: &DiscreteScenario,
    settings: &OracleSettings,
) -> Result<OracleResult> {
    ensure_small(scenario)?;
    settings.validate()?;
    let g = settings.grid_points_per_dim;
    let k = scenario.k();
    let caps = epsilon_caps(scenario);
    let b = scenario.budget();
    // Payment caps: lambda_i p_i <= B.
    let p_caps: Vec<f64> = scenario.types().iter().map(|t| b / t.lambda).collect();
    let mut windows: Vec<(f64, f64)> = caps
        .iter()
        .map(|&c| (c / g as f64, c))
        .chain(p_caps.iter().map(|&c| (0.0, c)))
        .collect();
    let tol = settings.feasibility_tol;
    let mut best: Option<(f64, Vec<f64>)> = None;

    for _ in 0..settings.refinement_rounds {
        for_each_grid_point(&windows, g, |point| {
            let (eps, p) = point.split_at(k);
            if full_feasible(scenario, eps, p, tol) {
                let obj = objective(scenario, eps);
                if best.as_ref().is_none_or(|(bo, _)| obj < *bo) {
                    best = Some((obj, point.to_vec()));
                }
            }
        });
        let Some((_, ref center)) = best else {
            return Err(Error::NoFeasiblePoint);
        };
        let center = center.clone();
        shrink_windows(&mut windows, &center, 5.0);
    }

    let (_, point) = best.ok_or(Error::NoFeasiblePoint)?;
    let (eps, p) = point.split_at(k);
    let menu = menu_from(eps, p, Regime::Incomplete);
    Ok(OracleResult {
        objective: objective_value(&menu, scenario),
        active_constraints: active_constraints(scenario, &menu, 1.0 / g as f64),
        feasible: true,
        menu,
    })
}

/// Sample random NON-monotone epsilon tuples and confirm none of them is
/// feasible with a strictly better objective than `incumbent_objective`.
/// Returns the number of violating samples found (0 expected).
pub fn spot_check_non_monotone(
    scenario: &DiscreteScenario,
    incumbent_objective: f64,
    samples: usize,
    seed: u64,
) -> usize {
    let k = scenario.k();
    if k < 2 {
        return 0;
    }
    let caps = epsilon_caps(scenario);
    let mut rng = SeededStream::new(seed);
    let mut violations = 0;
    let mut drawn = 0;
    while drawn < samples {
        let eps: Vec<f64> = caps.iter().map(|&c| c * rng.next_uniform()).collect();
        if eps.windows(2).all(|w| w[1] <= w[0]) {
            continue; // only interested in non-monotone tuples
        }
        drawn += 1;
        let p = payments_ic_chain(scenario, &eps);
        if full_feasible(scenario, &eps, &p, 1e-9)
            && objective(scenario, &eps) < incumbent_objective * (1.0 - 1e-9)
        {
            violations += 1;
        }
    }
    violations
}

/// Normalized KKT stationarity residuals of a menu.
///
/// The stationarity conditions are `-2 lambda_i / eps_i^3 + a w_i = 0` with
/// `w_i = lambda_i theta_i` (complete) or `w_i = H_i` (incomplete). The
/// multiplier `a` is recovered from type 0 and each residual is reported as
/// `a w_i eps_i^3 / (2 lambda_i) - 1`, which is 0 at the optimum.
pub fn kkt_residuals(menu: &ContractMenu, scenario: &DiscreteScenario) -> Result<Vec<f64>> {
    let types = scenario.types();
    if menu.items.len() != types.len() {
        return Err(Error::LengthMismatch {
            what: "menu items vs scenario types",
            expected: types.len(),
            actual: menu.items.len(),
        });
    }
    // For the incomplete regime the monotonicity multipliers telescope to
    // zero over each pooled block, so stationarity holds with the block
    // aggregates in place of the per-type lambda and H.
    let pairs: Vec<(f64, f64)> = match menu.regime {
        Regime::Complete => types.iter().map(|t| (t.lambda, t.lambda * t.theta)).collect(),
        Regime::Incomplete => pooled_incomplete_weights(scenario),
    };
    let e0 = menu.items[0].epsilon;
    let multiplier = 2.0 * pairs[0].0 / (pairs[0].1 * e0 * e0 * e0);
    Ok(menu
        .items
        .iter()
        .zip(&pairs)
        .map(|(it, &(l, w))| {
            let e3 = it.epsilon * it.epsilon * it.epsilon;
            multiplier * w * e3 / (2.0 * l) - 1.0
        })
        .collect())
}
