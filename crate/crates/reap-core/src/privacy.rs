//! Laplace-mechanism calibration and the privacy-to-accuracy bridge.
//!
//! A user reporting a reading with privacy level `epsilon` over data range
//! `gamma` adds Laplace(0, gamma/epsilon) noise. The fusion center's average
//! of `n` such reports misses the true average by more than `alpha` with
//! probability at most `1 - delta`, where `alpha` follows from Chebyshev's
//! inequality applied to the summed noise variance.

use alloc::vec::Vec;

use crate::math;
use crate::rng::SeededStream;
use crate::{Error, Result};

/// Aggregation context: data range, confidence level and population size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingContext {
    gamma: f64,
    delta: f64,
    n: usize,
}

impl SensingContext {
    /// `gamma` is the declared range of a reading (readings are not
    /// clipped to it), `delta` the confidence level in `[0, 1)`, `n` the
    /// number of participatory users.
    pub fn new(gamma: f64, delta: f64, n: usize) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::NonPositive {
                field: "gamma",
                value: gamma,
            });
        }
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::OutOfRange {
                field: "delta",
                value: delta,
            });
        }
        if n == 0 {
            return Err(Error::NonPositive {
                field: "n",
                value: 0.0,
            });
        }
        Ok(Self { gamma, delta, n })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Scale parameter of a zero-mean Laplace distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceScale(f64);

impl LaplaceScale {
    pub fn new(b: f64) -> Result<Self> {
        if !(b > 0.0) {
            return Err(Error::NonPositive {
                field: "b",
                value: b,
            });
        }
        Ok(Self(b))
    }

    pub fn b(&self) -> f64 {
        self.0
    }
}

/// Differential-privacy parameter; smaller means stronger privacy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PplLevel(f64);

impl PplLevel {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::NonPositive {
                field: "epsilon",
                value: epsilon,
            });
        }
        Ok(Self(epsilon))
    }

    pub fn epsilon(&self) -> f64 {
        self.0
    }
}

/// A raw reading together with its noisy, reportable version.
///
/// `raw` is retained for simulation-side error accounting only; the
/// simulated fusion center never sees it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbedReading {
    pub raw: f64,
    pub noisy: f64,
    pub scale: LaplaceScale,
}

/// Noise scale achieving `epsilon`-differential privacy for readings with
/// range `gamma`: `b = gamma / epsilon`.
pub fn calibrate_laplace(gamma: f64, ppl: PplLevel) -> Result<LaplaceScale> {
    if !(gamma > 0.0) {
        return Err(Error::NonPositive {
            field: "gamma",
            value: gamma,
        });
    }
    LaplaceScale::new(gamma / ppl.epsilon())
}

/// Inverse CDF of Laplace(0, b) in sign-split form.
pub fn laplace_inverse_cdf(scale: LaplaceScale, u: f64) -> f64 {
    let b = scale.b();
    if u < 0.5 {
        b * math::ln(2.0 * u)
    } else {
        -b * math::ln(2.0 * (1.0 - u))
    }
}

/// One draw from Laplace(0, b), via the inverse CDF of one uniform draw.
pub fn sample_laplace(scale: LaplaceScale, rng: &mut SeededStream) -> f64 {
    laplace_inverse_cdf(scale, rng.next_uniform())
}

/// Perturb a raw reading with freshly sampled Laplace noise.
pub fn perturb(raw: f64, scale: LaplaceScale, rng: &mut SeededStream) -> PerturbedReading {
    PerturbedReading {
        raw,
        noisy: raw + sample_laplace(scale, rng),
        scale,
    }
}

/// Predicted confidence interval of the average aggregate:
/// `alpha = sqrt(2) * gamma / (n * sqrt(1 - delta)) * sqrt(sum 1/eps_i^2)`.
///
/// Smaller `alpha` means better aggregation accuracy.
pub fn predicted_accuracy(ctx: &SensingContext, ppls: &[PplLevel]) -> Result<f64> {
    if ppls.len() != ctx.n() {
        return Err(Error::LengthMismatch {
            what: "ppls vs ctx.n",
            expected: ctx.n(),
            actual: ppls.len(),
        });
    }
    let sum_inv_sq: f64 = ppls.iter().map(|p| 1.0 / (p.epsilon() * p.epsilon())).sum();
    Ok(math::sqrt(2.0) * ctx.gamma() / (ctx.n() as f64 * math::sqrt(1.0 - ctx.delta()))
        * math::sqrt(sum_inv_sq))
}

/// Chebyshev bound on `Pr[|s - s_hat| >= alpha]`: `2/(alpha^2 n^2) * sum b_i^2`,
/// clamped to `[0, 1]` for reporting.
pub fn chebyshev_error_bound(
    ctx: &SensingContext,
    scales: &[LaplaceScale],
    alpha: f64,
) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::NonPositive {
            field: "alpha",
            value: alpha,
        });
    }
    if scales.len() != ctx.n() {
        return Err(Error::LengthMismatch {
            what: "scales vs ctx.n",
            expected: ctx.n(),
            actual: scales.len(),
        });
    }
    let sum_b_sq: f64 = scales.iter().map(|s| s.b() * s.b()).sum();
    let n = ctx.n() as f64;
    let bound = 2.0 / (alpha * alpha * n * n) * sum_b_sq;
    Ok(bound.clamp(0.0, 1.0))
}

/// Calibrated scales for a list of privacy levels under a common gamma.
pub fn calibrate_all(gamma: f64, ppls: &[PplLevel]) -> Result<Vec<LaplaceScale>> {
    ppls.iter().map(|p| calibrate_laplace(gamma, *p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ppl(e: f64) -> PplLevel {
        PplLevel::new(e).unwrap()
    }

    #[test]
    fn calibration_is_gamma_over_epsilon() {
        assert_eq!(calibrate_laplace(10.0, ppl(2.0)).unwrap().b(), 5.0);
        assert_eq!(calibrate_laplace(1.0, ppl(1.0)).unwrap().b(), 1.0);
        assert_eq!(calibrate_laplace(10.0, ppl(0.5)).unwrap().b(), 20.0);
    }

    #[test]
    fn calibration_rejects_bad_inputs() {
        assert!(matches!(
            calibrate_laplace(0.0, ppl(1.0)),
            Err(Error::NonPositive { field: "gamma", .. })
        ));
        assert!(matches!(
            PplLevel::new(-1.0),
            Err(Error::NonPositive { field: "epsilon", .. })
        ));
    }

    #[test]
    fn inverse_cdf_median_is_zero() {
        let s = LaplaceScale::new(3.0).unwrap();
        assert_eq!(laplace_inverse_cdf(s, 0.5), 0.0);
    }

    #[test]
    fn sampling_is_deterministic_per_seed_and_index() {
        let s = LaplaceScale::new(5.0).unwrap();
        let a = sample_laplace(s, &mut SeededStream::substream(11, 3));
        let b = sample_laplace(s, &mut SeededStream::substream(11, 3));
        assert_eq!(a, b);
    }

    #[test]
    fn sample_variance_matches_two_b_squared() {
        let b = 5.0;
        let s = LaplaceScale::new(b).unwrap();
        let mut rng = SeededStream::new(1);
        let n = 1_000_000usize;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let x = sample_laplace(s, &mut rng);
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        let target = 2.0 * b * b;
        assert!(
            (var - target).abs() / target < 0.02,
            "var {var} vs {target}"
        );
        // mean within 5 standard errors of 0; se = sqrt(2b^2/n)
        let se = (target / n as f64).sqrt();
        assert!(mean.abs() < 5.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn perturb_is_additive() {
        let s = LaplaceScale::new(5.0).unwrap();
        let r = PerturbedReading {
            raw: 7.5,
            noisy: 7.5 + (-1.2),
            scale: s,
        };
        assert!((r.noisy - 6.3).abs() < 1e-12);
        // mean of many perturbations recovers the raw value
        let mut rng = SeededStream::new(2);
        let n = 1_000_000usize;
        let mean: f64 = (0..n).map(|_| perturb(3.0, s, &mut rng).noisy).sum::<f64>() / n as f64;
        assert!((mean - 3.0).abs() < 0.05, "mean {mean}");
    }

    #[test]
    fn predicted_accuracy_hand_value() {
        let ctx = SensingContext::new(10.0, 0.9, 100).unwrap();
        let ppls = vec![ppl(1.0); 100];
        let alpha = predicted_accuracy(&ctx, &ppls).unwrap();
        assert!((alpha - 4.47214).abs() < 1e-5, "alpha {alpha}");
    }

    #[test]
    fn predicted_accuracy_constants_cancel() {
        let ctx = SensingContext::new(10.0, 0.0, 1).unwrap();
        let alpha = predicted_accuracy(&ctx, &[ppl(2f64.sqrt() * 10.0)]).unwrap();
        assert!((alpha - 1.0).abs() < 1e-12);
    }

    #[test]
    fn predicted_accuracy_halves_when_epsilons_double() {
        let ctx = SensingContext::new(3.0, 0.5, 4).unwrap();
        let base: Vec<_> = [0.5, 1.0, 2.0, 4.0].iter().map(|&e| ppl(e)).collect();
        let doubled: Vec<_> = base.iter().map(|p| ppl(2.0 * p.epsilon())).collect();
        let a = predicted_accuracy(&ctx, &base).unwrap();
        let b = predicted_accuracy(&ctx, &doubled).unwrap();
        assert!((a / b - 2.0).abs() < 1e-12);
    }

    #[test]
    fn predicted_accuracy_length_mismatch() {
        let ctx = SensingContext::new(1.0, 0.5, 3).unwrap();
        assert!(matches!(
            predicted_accuracy(&ctx, &[ppl(1.0)]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn chebyshev_bound_at_predicted_alpha_equals_one_minus_delta() {
        let ctx = SensingContext::new(10.0, 0.9, 5).unwrap();
        let ppls: Vec<_> = [0.5, 1.0, 1.5, 2.0, 3.0].iter().map(|&e| ppl(e)).collect();
        let alpha = predicted_accuracy(&ctx, &ppls).unwrap();
        let scales = calibrate_all(ctx.gamma(), &ppls).unwrap();
        let bound = chebyshev_error_bound(&ctx, &scales, alpha).unwrap();
        assert!(((bound - 0.1) / 0.1).abs() < 1e-12, "bound {bound}");
    }

    #[test]
    fn chebyshev_bound_small_cases() {
        let ctx = SensingContext::new(1.0, 0.0, 1).unwrap();
        let scales = [LaplaceScale::new(1.0).unwrap()];
        let bound = chebyshev_error_bound(&ctx, &scales, 2f64.sqrt()).unwrap();
        assert!((bound - 1.0).abs() < 1e-12);
        let tiny = chebyshev_error_bound(&ctx, &scales, 1e12).unwrap();
        assert!(tiny < 1e-12);
        assert!(chebyshev_error_bound(&ctx, &scales, 0.0).is_err());
    }

    #[test]
    fn delta_one_is_rejected() {
        assert!(SensingContext::new(1.0, 1.0, 1).is_err());
    }
}
