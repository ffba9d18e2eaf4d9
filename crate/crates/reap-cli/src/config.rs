//! Experiment configuration: a single JSON document with strict fields.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use reap_core::continuous::{ContinuousScenario, TypeDensity};
use reap_core::discrete::{DiscreteScenario, PuType};
use reap_core::privacy::SensingContext;

use crate::error::CliError;

/// Information regime the experiment targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeSpec {
    Complete,
    Incomplete,
    Continuous,
}

/// One explicit user type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeEntry {
    pub theta: f64,
    pub lambda: f64,
}

/// User types: either an explicit list or `k` evenly spaced types on a
/// range with the population split evenly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase")]
pub enum TypesSpec {
    List(Vec<TypeEntry>),
    Uniform {
        theta_low: f64,
        theta_high: f64,
        k: usize,
    },
}

fn default_lambda1_step() -> f64 {
    50.0
}

fn default_lambda2_step() -> f64 {
    10.0
}

/// Parameter sweep request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase", tag = "parameter")]
pub enum SweepSpec {
    Budget {
        start: f64,
        end: f64,
        steps: usize,
    },
    K {
        start: usize,
        end: usize,
        steps: usize,
    },
    #[serde(rename = "lambda-grid")]
    LambdaGrid {
        #[serde(default = "default_lambda1_step")]
        lambda1_step: f64,
        #[serde(default = "default_lambda2_step")]
        lambda2_step: f64,
    },
}

fn default_trials() -> usize {
    10_000
}

/// Top-level experiment configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub regime: RegimeSpec,
    pub budget: f64,
    pub gamma: f64,
    pub delta: f64,
    pub n: usize,
    pub types: TypesSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Defaults used throughout the experiments: 200 users, uniform
    /// preferences on [5, 15] split into 20 types, budget 1000, data range
    /// 10, confidence 0.9.
    pub fn table_defaults(regime: RegimeSpec) -> Self {
        Self {
            regime,
            budget: 1000.0,
            gamma: 10.0,
            delta: 0.9,
            n: 200,
            types: TypesSpec::Uniform {
                theta_low: 5.0,
                theta_high: 15.0,
                k: 20,
            },
            sweep: None,
            trials: default_trials(),
            seed: 0,
            output: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    /// Explicit type list (evenly spaced when `types` is `uniform`).
    pub fn type_entries(&self) -> Result<Vec<TypeEntry>, CliError> {
        match &self.types {
            TypesSpec::List(list) => {
                if list.is_empty() {
                    return Err(CliError::Validation("types.list is empty".into()));
                }
                Ok(list.clone())
            }
            TypesSpec::Uniform {
                theta_low,
                theta_high,
                k,
            } => {
                if *k == 0 {
                    return Err(CliError::Validation("types.uniform.k must be >= 1".into()));
                }
                if !(theta_high > theta_low) {
                    return Err(CliError::Validation(
                        "types.uniform requires theta_high > theta_low".into(),
                    ));
                }
                let lambda = self.n as f64 / *k as f64;
                Ok((0..*k)
                    .map(|i| {
                        let theta = if *k == 1 {
                            0.5 * (theta_low + theta_high)
                        } else {
                            theta_low + (theta_high - theta_low) * i as f64 / (*k - 1) as f64
                        };
                        TypeEntry { theta, lambda }
                    })
                    .collect())
            }
        }
    }

    /// Discrete scenario for the configured types.
    pub fn discrete_scenario(&self) -> Result<DiscreteScenario, CliError> {
        let types: Result<Vec<PuType>, _> = self
            .type_entries()?
            .iter()
            .map(|t| PuType::new(t.theta, t.lambda))
            .collect();
        let scenario = DiscreteScenario::new(
            self.budget,
            types.map_err(|e| CliError::Validation(format!("types: {e}")))?,
            self.gamma,
            self.delta,
        )
        .map_err(|e| CliError::Validation(format!("scenario: {e}")))?;
        if scenario.ctx().n() != self.n {
            return Err(CliError::Validation(format!(
                "n is {} but type populations sum to {}",
                self.n,
                scenario.ctx().n()
            )));
        }
        Ok(scenario)
    }

    /// Continuous scenario; requires the `uniform` types spec.
    pub fn continuous_scenario(&self) -> Result<ContinuousScenario, CliError> {
        let TypesSpec::Uniform {
            theta_low,
            theta_high,
            ..
        } = self.types
        else {
            return Err(CliError::Validation(
                "continuous regime requires a uniform types spec".into(),
            ));
        };
        let density = TypeDensity::uniform(theta_low, theta_high)
            .map_err(|e| CliError::Validation(format!("density: {e}")))?;
        let ctx = SensingContext::new(self.gamma, self.delta, self.n)
            .map_err(|e| CliError::Validation(format!("context: {e}")))?;
        ContinuousScenario::new(self.budget, density, ctx)
            .map_err(|e| CliError::Validation(format!("scenario: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_identity() {
        let cfg = ExperimentConfig::table_defaults(RegimeSpec::Incomplete);
        let text = serde_json::to_string(&cfg).unwrap();
        let back = ExperimentConfig::from_json(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{"regime":"complete","budget":1,"gamma":1,"delta":0.5,"n":1,
            "types":{"list":[{"theta":1,"lambda":1}]},"bogus":true}"#;
        assert!(ExperimentConfig::from_json(text).is_err());
    }

    #[test]
    fn uniform_types_are_evenly_spaced_inclusive() {
        let cfg = ExperimentConfig::table_defaults(RegimeSpec::Incomplete);
        let entries = cfg.type_entries().unwrap();
        assert_eq!(entries.len(), 20);
        assert_eq!(entries[0].theta, 5.0);
        assert_eq!(entries[19].theta, 15.0);
        assert!(entries.iter().all(|t| (t.lambda - 10.0).abs() < 1e-12));
    }

    #[test]
    fn n_mismatch_is_a_validation_error() {
        let mut cfg = ExperimentConfig::table_defaults(RegimeSpec::Complete);
        cfg.n = 150;
        // uniform lambda = n/k keeps consistency; force a list mismatch
        cfg.types = TypesSpec::List(vec![TypeEntry {
            theta: 1.0,
            lambda: 100.0,
        }]);
        assert!(matches!(
            cfg.discrete_scenario(),
            Err(CliError::Validation(_))
        ));
    }
}
