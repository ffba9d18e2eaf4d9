//! JSON documents for designed menus.

use serde::{Deserialize, Serialize};

use reap_core::continuous::ContinuousMenu;
use reap_core::discrete::{ContractItem, ContractMenu, DiscreteScenario, PuType, Regime};

use crate::config::TypeEntry;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ItemEntry {
    pub epsilon: f64,
    pub payment: f64,
}

/// Serialized discrete menu, self-contained enough to re-verify.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MenuDocument {
    pub regime: String,
    pub types: Vec<TypeEntry>,
    pub items: Vec<ItemEntry>,
    pub budget: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl MenuDocument {
    pub fn from_menu(menu: &ContractMenu, scenario: &DiscreteScenario) -> Self {
        Self {
            regime: match menu.regime {
                Regime::Complete => "complete".into(),
                Regime::Incomplete => "incomplete".into(),
            },
            types: scenario
                .types()
                .iter()
                .map(|t| TypeEntry {
                    theta: t.theta,
                    lambda: t.lambda,
                })
                .collect(),
            items: menu
                .items
                .iter()
                .map(|it| ItemEntry {
                    epsilon: it.epsilon,
                    payment: it.payment,
                })
                .collect(),
            budget: scenario.budget(),
            gamma: scenario.ctx().gamma(),
            delta: scenario.ctx().delta(),
        }
    }

    pub fn regime(&self) -> Result<Regime, CliError> {
        match self.regime.as_str() {
            "complete" => Ok(Regime::Complete),
            "incomplete" => Ok(Regime::Incomplete),
            other => Err(CliError::Validation(format!("unknown regime '{other}'"))),
        }
    }

    pub fn scenario(&self) -> Result<DiscreteScenario, CliError> {
        let types: Result<Vec<PuType>, _> = self
            .types
            .iter()
            .map(|t| PuType::new(t.theta, t.lambda))
            .collect();
        DiscreteScenario::new(
            self.budget,
            types.map_err(|e| CliError::Validation(format!("menu types: {e}")))?,
            self.gamma,
            self.delta,
        )
        .map_err(|e| CliError::Validation(format!("menu scenario: {e}")))
    }

    pub fn menu(&self) -> Result<ContractMenu, CliError> {
        Ok(ContractMenu {
            items: self
                .items
                .iter()
                .map(|it| ContractItem {
                    epsilon: it.epsilon,
                    payment: it.payment,
                })
                .collect(),
            regime: self.regime()?,
        })
    }
}

/// Serialized continuous menu.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuousMenuDocument {
    pub theta_low: f64,
    pub theta_high: f64,
    pub grid: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub payment: Vec<f64>,
    pub c1: f64,
    pub c2: f64,
    pub budget: f64,
}

impl ContinuousMenuDocument {
    pub fn from_menu(menu: &ContinuousMenu, budget: f64) -> Self {
        Self {
            theta_low: menu.grid[0],
            theta_high: *menu.grid.last().unwrap(),
            grid: menu.grid.clone(),
            epsilon: menu.eps_values.clone(),
            payment: menu.pay_values.clone(),
            c1: menu.c1,
            c2: menu.c2,
            budget,
        }
    }

    pub fn menu(&self) -> ContinuousMenu {
        ContinuousMenu {
            grid: self.grid.clone(),
            eps_values: self.epsilon.clone(),
            pay_values: self.payment.clone(),
            c1: self.c1,
            c2: self.c2,
        }
    }
}
