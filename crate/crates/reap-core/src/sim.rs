//! Agent-based simulation of the contract workflow.
//!
//! The fusion center broadcasts a menu, each agent picks the item that
//! maximizes its utility, perturbs its reading with Laplace noise scaled to
//! the chosen privacy level, and the center averages the noisy reports.
//! Monte Carlo over fresh noise (fixed raw readings) measures the empirical
//! error distribution against the predicted confidence interval.

use alloc::vec::Vec;

use crate::continuous::{eval_menu, ContinuousMenu, ContinuousScenario};
use crate::discrete::{utility, ContractMenu, DiscreteScenario, Regime};
use crate::math;
use crate::privacy::{sample_laplace, LaplaceScale, SensingContext};
use crate::rng::SeededStream;
use crate::{Error, Result};

/// One participatory user in a simulation round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Agent {
    pub id: usize,
    pub theta: f64,
    pub raw_reading: f64,
}

/// Distribution the raw readings are drawn from.
///
/// The aggregation error is noise-only, so results must not depend on this
/// choice; a test pins that down.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RawDistribution {
    Uniform { low: f64, high: f64 },
    /// Equal-weight mixture of two uniform lobes.
    Bimodal {
        first: (f64, f64),
        second: (f64, f64),
    },
}

impl RawDistribution {
    pub fn sample(&self, rng: &mut SeededStream) -> f64 {
        match *self {
            RawDistribution::Uniform { low, high } => low + (high - low) * rng.next_uniform(),
            RawDistribution::Bimodal { first, second } => {
                let (lo, hi) = if rng.next_uniform() < 0.5 { first } else { second };
                lo + (hi - lo) * rng.next_uniform()
            }
        }
    }
}

/// Outcome of a single reporting round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundResult {
    /// Chosen menu item per agent (discrete menus only).
    pub chosen_index: Vec<usize>,
    /// Noisy values the center received.
    pub reports: Vec<f64>,
    pub s_true: f64,
    pub s_hat: f64,
    pub abs_error: f64,
    pub total_payment: f64,
}

/// Aggregated Monte Carlo statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub trials: usize,
    pub predicted_alpha: f64,
    /// Fraction of trials with `abs_error >= predicted_alpha`.
    pub violation_rate: f64,
    pub mean_abs_error: f64,
    /// `(quantile level, abs_error value)` pairs.
    pub error_quantiles: Vec<(f64, f64)>,
}

/// Instantiate agents for a discrete scenario.
///
/// Each type's `lambda` must round to an integer; the rounded counts must
/// sum to `n`. Raw readings are i.i.d. draws from `raw`, deterministic for
/// a given seed.
pub fn build_population(
    scenario: &DiscreteScenario,
    raw: &RawDistribution,
    seed: u64,
) -> Result<Vec<Agent>> {
    let counts: Vec<usize> = scenario
        .types()
        .iter()
        .map(|t| libm::round(t.lambda) as usize)
        .collect();
    let total: usize = counts.iter().sum();
    if total != scenario.ctx().n() {
        return Err(Error::PopulationMismatch {
            expected: scenario.ctx().n(),
            actual: total,
        });
    }
    let mut rng = SeededStream::substream(seed, 0);
    let mut agents = Vec::with_capacity(total);
    for (t, &count) in scenario.types().iter().zip(&counts) {
        for _ in 0..count {
            agents.push(Agent {
                id: agents.len(),
                theta: t.theta,
                raw_reading: raw.sample(&mut rng),
            });
        }
    }
    Ok(agents)
}

/// Instantiate agents for a continuous scenario, sampling each theta from
/// the type density by numeric inverse-CDF.
pub fn build_population_continuous(
    scenario: &ContinuousScenario,
    raw: &RawDistribution,
    seed: u64,
) -> Vec<Agent> {
    let d = scenario.density();
    let mut theta_rng = SeededStream::substream(seed, 1);
    let mut raw_rng = SeededStream::substream(seed, 0);
    (0..scenario.ctx().n())
        .map(|id| {
            let u = theta_rng.next_uniform();
            let (mut lo, mut hi) = (d.theta_low(), d.theta_high());
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if d.cdf(mid) < u {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Agent {
                id,
                theta: 0.5 * (lo + hi),
                raw_reading: raw.sample(&mut raw_rng),
            }
        })
        .collect()
}

/// Index of the utility-maximizing item for preference `theta`.
///
/// Adjacent IC constraints bind with equality at the optimum, so a type can
/// be exactly indifferent between its own item and the next one; ties
/// (within a small relative tolerance) resolve toward the larger-epsilon
/// item, which is the one designed for the agent's own type.
pub fn select_item(theta: f64, menu: &ContractMenu) -> usize {
    let mut best = 0usize;
    let mut best_u = utility(&menu.items[0], theta);
    for (j, item) in menu.items.iter().enumerate().skip(1) {
        let u = utility(item, theta);
        let tol = 1e-9 * (1.0 + math::abs(best_u).max(math::abs(u)));
        if u > best_u + tol {
            best = j;
            best_u = u;
        }
    }
    best
}

fn round_from_parts(
    raws: &[f64],
    per_agent: &[(f64, f64)], // (epsilon, payment)
    gamma: f64,
    mut noise: impl FnMut(f64) -> f64,
) -> RoundResult {
    let n = raws.len() as f64;
    let mut reports = Vec::with_capacity(raws.len());
    let mut total_payment = 0.0;
    // Error is accumulated from the noise alone so it is bit-for-bit
    // independent of the raw readings.
    let mut noise_sum = 0.0;
    for (&raw, &(eps, pay)) in raws.iter().zip(per_agent) {
        let b = gamma / eps;
        let eta = noise(b);
        reports.push(raw + eta);
        noise_sum += eta;
        total_payment += pay;
    }
    let s_true = raws.iter().sum::<f64>() / n;
    let noise_mean = noise_sum / n;
    RoundResult {
        chosen_index: Vec::new(),
        reports,
        s_true,
        s_hat: s_true + noise_mean,
        abs_error: math::abs(noise_mean),
        total_payment,
    }
}

/// Index of the type whose preference is closest to `theta`.
fn own_type_index(theta: f64, scenario: &DiscreteScenario) -> usize {
    scenario
        .types()
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            math::abs(a.theta - theta)
                .partial_cmp(&math::abs(b.theta - theta))
                .unwrap()
        })
        .map(|(i, _)| i)
        .unwrap()
}

/// Item chosen per agent. Under incomplete information agents self-select
/// by utility; under complete information the center knows every type and
/// serves each agent the item designed for it (the complete-information
/// menu is not incentive compatible, so argmax would be wrong there).
fn discrete_parts(
    agents: &[Agent],
    menu: &ContractMenu,
    scenario: &DiscreteScenario,
) -> (Vec<usize>, Vec<(f64, f64)>) {
    let chosen: Vec<usize> = agents
        .iter()
        .map(|a| match menu.regime {
            Regime::Complete => own_type_index(a.theta, scenario),
            Regime::Incomplete => select_item(a.theta, menu),
        })
        .collect();
    let parts = chosen
        .iter()
        .map(|&j| (menu.items[j].epsilon, menu.items[j].payment))
        .collect();
    (chosen, parts)
}

/// One reporting round against a discrete menu.
pub fn run_round(
    agents: &[Agent],
    menu: &ContractMenu,
    scenario: &DiscreteScenario,
    rng: &mut SeededStream,
) -> RoundResult {
    let (chosen, parts) = discrete_parts(agents, menu, scenario);
    let raws: Vec<f64> = agents.iter().map(|a| a.raw_reading).collect();
    let mut result = round_from_parts(&raws, &parts, scenario.ctx().gamma(), |b| {
        sample_laplace(LaplaceScale::new(b).unwrap(), rng)
    });
    result.chosen_index = chosen;
    result
}

/// Round with the noise forced to zero; `s_hat` must equal `s_true`.
pub fn run_round_noiseless(
    agents: &[Agent],
    menu: &ContractMenu,
    scenario: &DiscreteScenario,
) -> RoundResult {
    let (chosen, parts) = discrete_parts(agents, menu, scenario);
    let raws: Vec<f64> = agents.iter().map(|a| a.raw_reading).collect();
    let mut result = round_from_parts(&raws, &parts, scenario.ctx().gamma(), |_| 0.0);
    result.chosen_index = chosen;
    result
}

/// One reporting round against a continuous menu (direct revelation: each
/// agent is served the item at its own theta).
pub fn run_round_continuous(
    agents: &[Agent],
    menu: &ContinuousMenu,
    gamma: f64,
    rng: &mut SeededStream,
) -> Result<RoundResult> {
    let parts: Result<Vec<(f64, f64)>> = agents
        .iter()
        .map(|a| eval_menu(menu, a.theta).map(|it| (it.epsilon, it.payment)))
        .collect();
    let parts = parts?;
    let raws: Vec<f64> = agents.iter().map(|a| a.raw_reading).collect();
    Ok(round_from_parts(&raws, &parts, gamma, |b| {
        sample_laplace(LaplaceScale::new(b).unwrap(), rng)
    }))
}

fn alpha_of_epsilons(ctx: &SensingContext, epsilons: &[f64]) -> f64 {
    let n = ctx.n() as f64;
    let sum: f64 = epsilons.iter().map(|e| 1.0 / (e * e)).sum();
    math::sqrt(2.0) * ctx.gamma() / (n * math::sqrt(1.0 - ctx.delta())) * math::sqrt(sum)
}

fn quantiles(sorted_errors: &[f64]) -> Vec<(f64, f64)> {
    [0.5, 0.9, 0.95, 0.99]
        .iter()
        .map(|&q| {
            let idx = ((sorted_errors.len() - 1) as f64 * q) as usize;
            (q, sorted_errors[idx])
        })
        .collect()
}

fn trials_from_parts(
    gamma: f64,
    raws: &[f64],
    per_agent: &[(f64, f64)],
    trials: usize,
    seed: u64,
) -> Vec<RoundResult> {
    (0..trials)
        .map(|trial| {
            let mut rng = SeededStream::substream(seed, trial as u64);
            round_from_parts(raws, per_agent, gamma, |b| {
                sample_laplace(LaplaceScale::new(b).unwrap(), &mut rng)
            })
        })
        .collect()
}

/// Condense per-trial outcomes into a Monte Carlo report.
pub fn summarize_trials(predicted_alpha: f64, rounds: &[RoundResult]) -> MonteCarloReport {
    let trials = rounds.len();
    let mut errors: Vec<f64> = rounds.iter().map(|r| r.abs_error).collect();
    let violations = errors.iter().filter(|&&e| e >= predicted_alpha).count();
    let mean_abs_error = errors.iter().sum::<f64>() / trials as f64;
    errors.sort_by(|a, b| a.partial_cmp(b).unwrap());
    MonteCarloReport {
        trials,
        predicted_alpha,
        violation_rate: violations as f64 / trials as f64,
        mean_abs_error,
        error_quantiles: quantiles(&errors),
    }
}

/// Predicted confidence interval for the items the agents actually receive.
pub fn predicted_alpha_discrete(
    agents: &[Agent],
    menu: &ContractMenu,
    scenario: &DiscreteScenario,
) -> f64 {
    let (_, parts) = discrete_parts(agents, menu, scenario);
    let epsilons: Vec<f64> = parts.iter().map(|&(e, _)| e).collect();
    alpha_of_epsilons(scenario.ctx(), &epsilons)
}

/// Per-trial rounds against a discrete menu; trial `t` uses stream `(seed, t)`.
pub fn simulate_trials(
    agents: &[Agent],
    menu: &ContractMenu,
    scenario: &DiscreteScenario,
    trials: usize,
    seed: u64,
) -> Vec<RoundResult> {
    let (_, parts) = discrete_parts(agents, menu, scenario);
    let raws: Vec<f64> = agents.iter().map(|a| a.raw_reading).collect();
    trials_from_parts(scenario.ctx().gamma(), &raws, &parts, trials, seed)
}

fn continuous_parts(agents: &[Agent], menu: &ContinuousMenu) -> Result<Vec<(f64, f64)>> {
    agents
        .iter()
        .map(|a| eval_menu(menu, a.theta).map(|it| (it.epsilon, it.payment)))
        .collect()
}

/// Predicted confidence interval under a continuous menu.
pub fn predicted_alpha_continuous(
    agents: &[Agent],
    menu: &ContinuousMenu,
    ctx: &SensingContext,
) -> Result<f64> {
    let parts = continuous_parts(agents, menu)?;
    let epsilons: Vec<f64> = parts.iter().map(|&(e, _)| e).collect();
    Ok(alpha_of_epsilons(ctx, &epsilons))
}

/// Per-trial rounds against a continuous menu.
pub fn simulate_trials_continuous(
    agents: &[Agent],
    menu: &ContinuousMenu,
    gamma: f64,
    trials: usize,
    seed: u64,
) -> Result<Vec<RoundResult>> {
    let parts = continuous_parts(agents, menu)?;
    let raws: Vec<f64> = agents.iter().map(|a| a.raw_reading).collect();
    Ok(trials_from_parts(gamma, &raws, &parts, trials, seed))
}

/// Monte Carlo over fresh noise with fixed raw readings, discrete menu.
///
/// Trial `t` draws its noise from stream `(seed, t)`, so results do not
/// depend on evaluation order.
pub fn monte_carlo(
    agents: &[Agent],
    menu: &ContractMenu,
    scenario: &DiscreteScenario,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloReport> {
    if trials == 0 {
        return Err(Error::OutOfRange {
            field: "trials",
            value: 0.0,
        });
    }
    let rounds = simulate_trials(agents, menu, scenario, trials, seed);
    Ok(summarize_trials(
        predicted_alpha_discrete(agents, menu, scenario),
        &rounds,
    ))
}

/// Monte Carlo against a continuous menu.
pub fn monte_carlo_continuous(
    agents: &[Agent],
    menu: &ContinuousMenu,
    ctx: &SensingContext,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloReport> {
    if trials == 0 {
        return Err(Error::OutOfRange {
            field: "trials",
            value: 0.0,
        });
    }
    let rounds = simulate_trials_continuous(agents, menu, ctx.gamma(), trials, seed)?;
    Ok(summarize_trials(
        predicted_alpha_continuous(agents, menu, ctx)?,
        &rounds,
    ))
}
