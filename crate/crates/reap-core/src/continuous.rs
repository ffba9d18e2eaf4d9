//! Optimal contract function for a continuum of user types.
//!
//! With types distributed on `[theta_low, theta_high]` with density `h`, the
//! design problem minimizes `integral h(theta)/eps(theta)^2` subject to a
//! per-capita budget, IR and IC. The IC constraints reduce to local
//! conditions (`eps` non-increasing, `p' - theta eps' = 0`), IR binds at the
//! top type, and the optimal-control stationarity condition yields
//!
//! ```text
//! eps(theta) = (2 h(theta) / (c1 * (theta h(theta) + H(theta))))^(1/3)
//! ```
//!
//! where `H` is the CDF of `h`. The co-state at the free lower boundary
//! vanishes, which fixes `c2 = 0`; `c1` follows from budget equality. Note
//! the `+ c1 H(theta)` term: the denominator is the continuum limit of the
//! discrete weights `H_i = lambda_i theta_i + dtheta_i * sum_{j<i} lambda_j`,
//! which the discrete-limit tests verify directly.
//!
//! The payment is recovered IR-consistently as
//! `p(theta) = theta eps(theta) + integral_theta^theta_high eps(tau) dtau`,
//! so that `p - theta eps` is non-increasing and exactly zero at the top.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::discrete::{DiscreteScenario, PuType};
use crate::math;
use crate::privacy::SensingContext;
use crate::{Error, Result};

type DensityFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A probability density of privacy preferences on a bounded support.
pub struct TypeDensity {
    theta_low: f64,
    theta_high: f64,
    pdf: DensityFn,
    cdf: Option<DensityFn>,
}

impl core::fmt::Debug for TypeDensity {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("TypeDensity")
            .field("theta_low", &self.theta_low)
            .field("theta_high", &self.theta_high)
            .finish()
    }
}

impl TypeDensity {
    /// Density from a pdf; the cdf is computed by quadrature on demand.
    pub fn from_pdf(
        theta_low: f64,
        theta_high: f64,
        pdf: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::build(theta_low, theta_high, Box::new(pdf), None)
    }

    /// Density with an explicit cdf (must satisfy `cdf(low)=0`, `cdf(high)=1`).
    pub fn with_cdf(
        theta_low: f64,
        theta_high: f64,
        pdf: impl Fn(f64) -> f64 + Send + Sync + 'static,
        cdf: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::build(theta_low, theta_high, Box::new(pdf), Some(Box::new(cdf)))
    }

    /// Uniform density on `[theta_low, theta_high]`.
    pub fn uniform(theta_low: f64, theta_high: f64) -> Result<Self> {
        let width = theta_high - theta_low;
        Self::with_cdf(
            theta_low,
            theta_high,
            move |_| 1.0 / width,
            move |t| ((t - theta_low) / width).clamp(0.0, 1.0),
        )
    }

    fn build(theta_low: f64, theta_high: f64, pdf: DensityFn, cdf: Option<DensityFn>) -> Result<Self> {
        if !(theta_low > 0.0) {
            return Err(Error::NonPositive {
                field: "theta_low",
                value: theta_low,
            });
        }
        if !(theta_high > theta_low) {
            return Err(Error::OutOfRange {
                field: "theta_high",
                value: theta_high,
            });
        }
        let d = Self {
            theta_low,
            theta_high,
            pdf,
            cdf,
        };
        let integral = d.integrate_pdf(d.theta_low, d.theta_high, 2048);
        if (integral - 1.0).abs() > 1e-6 {
            return Err(Error::DensityNotNormalized { integral });
        }
        Ok(d)
    }

    pub fn theta_low(&self) -> f64 {
        self.theta_low
    }

    pub fn theta_high(&self) -> f64 {
        self.theta_high
    }

    pub fn pdf(&self, theta: f64) -> f64 {
        (self.pdf)(theta)
    }

    /// Cumulative distribution, via the supplied cdf or Simpson quadrature.
    pub fn cdf(&self, theta: f64) -> f64 {
        match &self.cdf {
            Some(c) => c(theta),
            None => self.integrate_pdf(self.theta_low, theta.min(self.theta_high), 512),
        }
    }

    fn integrate_pdf(&self, a: f64, b: f64, intervals: usize) -> f64 {
        if b <= a {
            return 0.0;
        }
        let m = intervals.max(2) & !1;
        let h = (b - a) / m as f64;
        let mut sum = self.pdf(a) + self.pdf(b);
        for j in 1..m {
            let w = if j % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * self.pdf(a + j as f64 * h);
        }
        sum * h / 3.0
    }
}

/// A continuous design problem: budget, type density and sensing context.
#[derive(Debug)]
pub struct ContinuousScenario {
    budget: f64,
    density: TypeDensity,
    ctx: SensingContext,
}

impl ContinuousScenario {
    pub fn new(budget: f64, density: TypeDensity, ctx: SensingContext) -> Result<Self> {
        if !(budget > 0.0) {
            return Err(Error::NonPositive {
                field: "budget",
                value: budget,
            });
        }
        Ok(Self {
            budget,
            density,
            ctx,
        })
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn density(&self) -> &TypeDensity {
        &self.density
    }

    pub fn ctx(&self) -> &SensingContext {
        &self.ctx
    }
}

/// A solved contract function sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousMenu {
    pub grid: Vec<f64>,
    pub eps_values: Vec<f64>,
    pub pay_values: Vec<f64>,
    pub c1: f64,
    pub c2: f64,
}

/// A single evaluated point of a continuous menu.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluatedItem {
    pub epsilon: f64,
    pub payment: f64,
}

/// Composite Simpson quadrature over equally spaced samples (even panel count).
pub fn simpson(values: &[f64], step: f64) -> f64 {
    let m = values.len() - 1;
    debug_assert!(m >= 2 && m % 2 == 0);
    let mut sum = values[0] + values[m];
    for (j, v) in values.iter().enumerate().take(m).skip(1) {
        sum += if j % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    sum * step / 3.0
}

fn solve_on_grid(scenario: &ContinuousScenario, intervals: usize) -> Result<ContinuousMenu> {
    let d = scenario.density();
    let (low, high) = (d.theta_low(), d.theta_high());
    let m = intervals.max(2) & !1;
    let step = (high - low) / m as f64;
    let grid: Vec<f64> = (0..=m).map(|j| low + j as f64 * step).collect();

    let h: Vec<f64> = grid.iter().map(|&t| d.pdf(t)).collect();
    if h.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::SolverRejected("pdf not strictly positive on the support"));
    }
    let big_h: Vec<f64> = grid.iter().map(|&t| d.cdf(t)).collect();

    // Unscaled control from stationarity with c1 = 1, c2 = 0.
    let mut eps: Vec<f64> = grid
        .iter()
        .enumerate()
        .map(|(j, &t)| math::cbrt(2.0 * h[j] / (t * h[j] + big_h[j])))
        .collect();
    for w in eps.windows(2) {
        if w[1] > w[0] * (1.0 + 1e-9) {
            return Err(Error::SolverRejected("epsilon not non-increasing on the grid"));
        }
    }

    // Payment: p = theta*eps + tail integral of eps (trapezoid from the top),
    // which pins the top type's utility to zero.
    let mut pay = alloc::vec![0.0; m + 1];
    let mut tail = 0.0;
    for j in (0..=m).rev() {
        pay[j] = grid[j] * eps[j] + tail;
        if j > 0 {
            tail += 0.5 * (eps[j] + eps[j - 1]) * step;
        }
    }

    // Per-capita budget equality fixes the overall scale: every quantity is
    // homogeneous of degree -1/3 in c1, so one rescaling lands exactly on it.
    let ph: Vec<f64> = pay.iter().zip(&h).map(|(p, hv)| p * hv).collect();
    let spent = simpson(&ph, step);
    let target = scenario.budget() / scenario.ctx().n() as f64;
    let scale = target / spent;
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::SolverRejected("budget scaling is not finite"));
    }
    for v in eps.iter_mut().chain(pay.iter_mut()) {
        *v *= scale;
    }

    Ok(ContinuousMenu {
        grid,
        eps_values: eps,
        pay_values: pay,
        c1: 1.0 / (scale * scale * scale),
        c2: 0.0,
    })
}

/// Solve the continuous design problem.
///
/// Starts at 64 grid intervals and doubles until the objective changes by
/// less than 1e-6 relative or `grid_size` intervals are reached.
pub fn solve_continuous(scenario: &ContinuousScenario, grid_size: usize) -> Result<ContinuousMenu> {
    let cap = grid_size.max(64);
    let mut intervals = 64usize;
    let mut menu = solve_on_grid(scenario, intervals)?;
    let mut obj = objective_continuous(&menu, scenario);
    while intervals < cap {
        intervals = (intervals * 2).min(cap);
        let refined = solve_on_grid(scenario, intervals)?;
        let refined_obj = objective_continuous(&refined, scenario);
        let done = (refined_obj - obj).abs() <= 1e-6 * obj.abs();
        menu = refined;
        obj = refined_obj;
        if done {
            break;
        }
    }
    Ok(menu)
}

/// Piecewise-linear evaluation of the solved contract at `theta`.
pub fn eval_menu(menu: &ContinuousMenu, theta: f64) -> Result<EvaluatedItem> {
    let (low, high) = (menu.grid[0], *menu.grid.last().unwrap());
    if !(low..=high).contains(&theta) {
        return Err(Error::OutsideSupport {
            theta,
            low,
            high,
        });
    }
    let m = menu.grid.len() - 1;
    let step = (high - low) / m as f64;
    let pos = (theta - low) / step;
    let j = (pos as usize).min(m - 1);
    let frac = pos - j as f64;
    Ok(EvaluatedItem {
        epsilon: menu.eps_values[j] + frac * (menu.eps_values[j + 1] - menu.eps_values[j]),
        payment: menu.pay_values[j] + frac * (menu.pay_values[j + 1] - menu.pay_values[j]),
    })
}

/// The design objective `integral h(theta) / eps(theta)^2 dtheta`.
pub fn objective_continuous(menu: &ContinuousMenu, scenario: &ContinuousScenario) -> f64 {
    let d = scenario.density();
    let step = (menu.grid[menu.grid.len() - 1] - menu.grid[0]) / (menu.grid.len() - 1) as f64;
    let vals: Vec<f64> = menu
        .grid
        .iter()
        .zip(&menu.eps_values)
        .map(|(&t, &e)| d.pdf(t) / (e * e))
        .collect();
    simpson(&vals, step)
}

/// Total expected spend `n * integral p(theta) h(theta) dtheta`.
pub fn total_spend(menu: &ContinuousMenu, scenario: &ContinuousScenario) -> f64 {
    let d = scenario.density();
    let step = (menu.grid[menu.grid.len() - 1] - menu.grid[0]) / (menu.grid.len() - 1) as f64;
    let vals: Vec<f64> = menu
        .grid
        .iter()
        .zip(&menu.pay_values)
        .map(|(&t, &p)| p * d.pdf(t))
        .collect();
    simpson(&vals, step) * scenario.ctx().n() as f64
}

/// Equal-width discretization of a continuous scenario into `k` types:
/// each cell contributes `lambda_i = n * (H(right) - H(left))` users placed
/// at the cell's RIGHT endpoint. The conservative (highest-valuation)
/// placement keeps every pooled user individually rational, and it makes
/// the discrete screening weights agree with the continuum at the cell
/// center to second order, so the objective converges at O(1/k^2) instead
/// of O(1/k).
pub fn discretize(scenario: &ContinuousScenario, k: usize) -> Result<DiscreteScenario> {
    let d = scenario.density();
    let (low, high) = (d.theta_low(), d.theta_high());
    let n = scenario.ctx().n() as f64;
    let width = (high - low) / k as f64;
    let types: Result<Vec<PuType>> = (0..k)
        .map(|i| {
            let l = low + i as f64 * width;
            let r = l + width;
            let mass = d.cdf(r) - d.cdf(l);
            PuType::new(r, n * mass)
        })
        .collect();
    DiscreteScenario::new(
        scenario.budget(),
        types?,
        scenario.ctx().gamma(),
        scenario.ctx().delta(),
    )
}
