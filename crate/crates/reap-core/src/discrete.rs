//! Closed-form optimal contract menus for finitely many user types.
//!
//! The fusion center minimizes `sum_i lambda_i / eps_i^2` (the scale-free
//! surrogate for the aggregation confidence interval) subject to a budget
//! `sum_i lambda_i p_i <= B` and, depending on the information regime,
//! individual-rationality and incentive-compatibility constraints.
//!
//! Under complete information every IR constraint binds and the optimum is
//!
//! ```text
//! eps_i = B / (sum_j lambda_j theta_j^(2/3)) * theta_i^(-1/3),   p_i = theta_i eps_i.
//! ```
//!
//! Under incomplete information only the top type's IR binds, adjacent IC
//! constraints bind downward, and with
//!
//! ```text
//! dtheta_i = theta_i - theta_{i-1}
//! H_1 = lambda_1 theta_1,    H_i = lambda_i theta_i + dtheta_i * sum_{j<i} lambda_j
//! G   = B / sum_j H_j^(2/3) lambda_j^(1/3)
//! ```
//!
//! the optimum is `eps_i = G (lambda_i / H_i)^(1/3)`, `p_k = theta_k eps_k`,
//! and `p_i = theta_i eps_i + sum_{j>i} dtheta_j eps_j` for `i < k`.

use alloc::vec::Vec;

use crate::math;
use crate::privacy::SensingContext;
use crate::{Error, Result};

/// A privacy-preference level with its population count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PuType {
    pub theta: f64,
    pub lambda: f64,
}

impl PuType {
    /// `lambda = 0` is accepted on input; the scenario constructor drops
    /// unpopulated types before solving.
    pub fn new(theta: f64, lambda: f64) -> Result<Self> {
        if !(theta > 0.0) {
            return Err(Error::NonPositive {
                field: "theta",
                value: theta,
            });
        }
        if !(lambda >= 0.0) {
            return Err(Error::OutOfRange {
                field: "lambda",
                value: lambda,
            });
        }
        Ok(Self { theta, lambda })
    }
}

/// One privacy-payment pair of a contract menu.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractItem {
    pub epsilon: f64,
    pub payment: f64,
}

/// Information regime a menu was designed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Complete,
    Incomplete,
}

/// A contract menu, index-aligned with the scenario's (populated) types.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractMenu {
    pub items: Vec<ContractItem>,
    pub regime: Regime,
}

/// A validated discrete design problem.
///
/// Construction sorts types ascending by theta, drops types with zero
/// population, and derives the population size `n = round(sum lambda_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteScenario {
    budget: f64,
    types: Vec<PuType>,
    ctx: SensingContext,
    /// For each kept (sorted) type, its position in the caller's input list.
    source_indices: Vec<usize>,
}

impl DiscreteScenario {
    pub fn new(budget: f64, types: Vec<PuType>, gamma: f64, delta: f64) -> Result<Self> {
        if !(budget > 0.0) {
            return Err(Error::NonPositive {
                field: "budget",
                value: budget,
            });
        }
        if types.is_empty() {
            return Err(Error::EmptyTypes);
        }
        let mut indexed: Vec<(usize, PuType)> = types
            .into_iter()
            .enumerate()
            .filter(|(_, t)| t.lambda > 0.0)
            .collect();
        if indexed.is_empty() {
            return Err(Error::AllLambdaZero);
        }
        indexed.sort_by(|a, b| a.1.theta.partial_cmp(&b.1.theta).unwrap());
        let total_lambda: f64 = indexed.iter().map(|(_, t)| t.lambda).sum();
        let n = libm::round(total_lambda) as usize;
        if n == 0 {
            return Err(Error::AllLambdaZero);
        }
        let ctx = SensingContext::new(gamma, delta, n)?;
        let (source_indices, kept): (Vec<usize>, Vec<PuType>) = indexed.into_iter().unzip();
        Ok(Self {
            budget,
            types: kept,
            ctx,
            source_indices,
        })
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    /// Populated types, sorted ascending by theta.
    pub fn types(&self) -> &[PuType] {
        &self.types
    }

    pub fn ctx(&self) -> &SensingContext {
        &self.ctx
    }

    /// Input position each kept type came from.
    pub fn source_indices(&self) -> &[usize] {
        &self.source_indices
    }

    pub fn k(&self) -> usize {
        self.types.len()
    }

    /// Same scenario with a different budget.
    pub fn with_budget(&self, budget: f64) -> Result<Self> {
        let mut s = self.clone();
        if !(budget > 0.0) {
            return Err(Error::NonPositive {
                field: "budget",
                value: budget,
            });
        }
        s.budget = budget;
        Ok(s)
    }
}

/// Per-constraint residuals of a menu against a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintReport {
    /// `p_i - theta_i eps_i` per type.
    pub ir_residuals: Vec<f64>,
    /// `ic_matrix[i][j]` = utility of a type-i user choosing item j.
    pub ic_matrix: Vec<Vec<f64>>,
    /// `B - sum lambda_i p_i`.
    pub budget_residual: f64,
    /// Epsilons non-increasing in type index.
    pub monotonic: bool,
}

impl ConstraintReport {
    /// True when all IR/IC inequalities, the budget and monotonicity hold
    /// within `tol` (absolute, applied to residuals scaled by the budget).
    pub fn satisfied(&self, budget: f64, tol: f64) -> bool {
        let scale = budget.abs().max(1.0);
        let slack = tol * scale;
        if !self.monotonic || self.budget_residual < -slack {
            return false;
        }
        if self.ir_residuals.iter().any(|&r| r < -slack) {
            return false;
        }
        for (i, row) in self.ic_matrix.iter().enumerate() {
            let own = row[i];
            if row.iter().any(|&u| u > own + slack) {
                return false;
            }
        }
        true
    }
}

/// Utility of a user with preference `theta` accepting `item`:
/// `payment - theta * epsilon`.
pub fn utility(item: &ContractItem, theta: f64) -> f64 {
    item.payment - theta * item.epsilon
}

/// Optimal menu when the fusion center knows every user's type.
pub fn solve_complete(scenario: &DiscreteScenario) -> ContractMenu {
    let b = scenario.budget();
    let denom: f64 = scenario
        .types()
        .iter()
        .map(|t| t.lambda * math::powf(t.theta, 2.0 / 3.0))
        .sum();
    let items = scenario
        .types()
        .iter()
        .map(|t| {
            let epsilon = b / denom * math::powf(t.theta, -1.0 / 3.0);
            ContractItem {
                epsilon,
                payment: t.theta * epsilon,
            }
        })
        .collect();
    ContractMenu {
        items,
        regime: Regime::Complete,
    }
}

/// The `H_i` weights of the incomplete-information problem.
pub fn incomplete_weights(scenario: &DiscreteScenario) -> Vec<f64> {
    let types = scenario.types();
    let mut cum_lambda = 0.0;
    let mut prev_theta = 0.0;
    types
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let h = if i == 0 {
                t.lambda * t.theta
            } else {
                t.lambda * t.theta + (t.theta - prev_theta) * cum_lambda
            };
            cum_lambda += t.lambda;
            prev_theta = t.theta;
            h
        })
        .collect()
}

/// Per-type `(sum lambda, sum H)` of the pooled block the type belongs to.
///
/// The relaxed stationary point has `eps_i` proportional to
/// `cbrt(lambda_i / H_i)`, which can order-invert for irregular type
/// distributions even though every truthful menu must have non-increasing
/// epsilons. Pooling adjacent violators restores the constrained optimum:
/// a pooled block shares one epsilon driven by its aggregate ratio, and
/// the block structure is invariant under the final budget scaling.
pub fn pooled_incomplete_weights(scenario: &DiscreteScenario) -> Vec<(f64, f64)> {
    let types = scenario.types();
    let h = incomplete_weights(scenario);
    // (lambda sum, H sum, type count) per block.
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(types.len());
    for (t, hi) in types.iter().zip(&h) {
        blocks.push((t.lambda, *hi, 1));
        while blocks.len() >= 2 {
            let (bl, bh, bn) = blocks[blocks.len() - 1];
            let (al, ah, an) = blocks[blocks.len() - 2];
            // Later block with the larger lambda/H ratio => merge.
            if bl * ah > al * bh {
                blocks.truncate(blocks.len() - 2);
                blocks.push((al + bl, ah + bh, an + bn));
            } else {
                break;
            }
        }
    }
    let mut out = Vec::with_capacity(types.len());
    for &(l, hsum, count) in &blocks {
        for _ in 0..count {
            out.push((l, hsum));
        }
    }
    out
}

/// Optimal menu when the fusion center only knows the type distribution.
pub fn solve_incomplete(scenario: &DiscreteScenario) -> ContractMenu {
    let types = scenario.types();
    let k = types.len();
    let h = incomplete_weights(scenario);
    let pooled = pooled_incomplete_weights(scenario);
    let shape: Vec<f64> = pooled.iter().map(|&(l, hsum)| math::cbrt(l / hsum)).collect();
    let g = scenario.budget()
        / h.iter()
            .zip(&shape)
            .map(|(hi, s)| hi * s)
            .sum::<f64>();
    let eps: Vec<f64> = shape.iter().map(|s| g * s).collect();
    // p_i = theta_i eps_i + sum_{j>i} dtheta_j eps_j, accumulated from the top.
    let mut items = Vec::with_capacity(k);
    let mut tail = 0.0;
    for i in (0..k).rev() {
        let payment = types[i].theta * eps[i] + tail;
        items.push(ContractItem {
            epsilon: eps[i],
            payment,
        });
        if i > 0 {
            tail += (types[i].theta - types[i - 1].theta) * eps[i];
        }
    }
    items.reverse();
    ContractMenu {
        items,
        regime: Regime::Incomplete,
    }
}

/// Residuals of every IR, IC, budget and monotonicity constraint.
pub fn check_constraints(menu: &ContractMenu, scenario: &DiscreteScenario) -> Result<ConstraintReport> {
    let types = scenario.types();
    if menu.items.len() != types.len() {
        return Err(Error::LengthMismatch {
            what: "menu items vs scenario types",
            expected: types.len(),
            actual: menu.items.len(),
        });
    }
    let ir_residuals: Vec<f64> = types
        .iter()
        .zip(&menu.items)
        .map(|(t, it)| utility(it, t.theta))
        .collect();
    let ic_matrix: Vec<Vec<f64>> = types
        .iter()
        .map(|t| menu.items.iter().map(|it| utility(it, t.theta)).collect())
        .collect();
    let spent: f64 = types
        .iter()
        .zip(&menu.items)
        .map(|(t, it)| t.lambda * it.payment)
        .sum();
    let monotonic = menu
        .items
        .windows(2)
        .all(|w| w[0].epsilon >= w[1].epsilon - 1e-12 * w[0].epsilon.abs());
    Ok(ConstraintReport {
        ir_residuals,
        ic_matrix,
        budget_residual: scenario.budget() - spent,
        monotonic,
    })
}

/// The design objective `sum_i lambda_i / eps_i^2`.
pub fn objective_value(menu: &ContractMenu, scenario: &DiscreteScenario) -> f64 {
    scenario
        .types()
        .iter()
        .zip(&menu.items)
        .map(|(t, it)| t.lambda / (it.epsilon * it.epsilon))
        .sum()
}

/// Predicted confidence interval for a menu, with each type's epsilon
/// weighted by its population.
pub fn alpha_of_menu(menu: &ContractMenu, scenario: &DiscreteScenario) -> f64 {
    let ctx = scenario.ctx();
    let n = ctx.n() as f64;
    math::sqrt(2.0) * ctx.gamma() / (n * math::sqrt(1.0 - ctx.delta()))
        * math::sqrt(objective_value(menu, scenario))
}

/// Accuracy ratio `alpha_incomplete / alpha_complete`; always >= 1.
pub fn accuracy_ratio(scenario: &DiscreteScenario) -> f64 {
    let a_i = alpha_of_menu(&solve_incomplete(scenario), scenario);
    let a_c = alpha_of_menu(&solve_complete(scenario), scenario);
    a_i / a_c
}
