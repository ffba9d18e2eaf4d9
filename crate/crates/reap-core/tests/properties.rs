//! Randomized structural properties of the closed-form menus.

use proptest::prelude::*;

use reap_core::discrete::{
    accuracy_ratio, alpha_of_menu, check_constraints, solve_complete, solve_incomplete, utility,
    DiscreteScenario, PuType,
};
use reap_core::privacy::{
    calibrate_all, chebyshev_error_bound, predicted_accuracy, PplLevel, SensingContext,
};

fn scenario_strategy() -> impl Strategy<Value = DiscreteScenario> {
    (
        1usize..=10,
        1.0f64..1_000_000.0,
        0.1f64..100.0,
        0.0f64..0.99,
    )
        .prop_flat_map(|(k, budget, gamma, delta)| {
            (
                proptest::collection::vec((0.1f64..100.0, 1.0f64..1000.0), k),
                Just(budget),
                Just(gamma),
                Just(delta),
            )
        })
        .prop_filter_map("degenerate thetas", |(pairs, budget, gamma, delta)| {
            let mut types: Vec<PuType> = pairs
                .iter()
                .map(|&(t, l)| PuType::new(t, l).unwrap())
                .collect();
            types.sort_by(|a, b| a.theta.partial_cmp(&b.theta).unwrap());
            // Nearly equal thetas make the menus numerically touchy without
            // adding coverage; keep a minimum relative gap.
            if types
                .windows(2)
                .any(|w| (w[1].theta - w[0].theta) < 1e-3 * w[1].theta)
            {
                return None;
            }
            DiscreteScenario::new(budget, types, gamma, delta).ok()
        })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn complete_menu_is_tight_and_exhausts_budget(s in scenario_strategy()) {
        let m = solve_complete(&s);
        for (t, it) in s.types().iter().zip(&m.items) {
            prop_assert!(rel(it.payment, t.theta * it.epsilon) < 1e-12);
        }
        let spent: f64 = s.types().iter().zip(&m.items).map(|(t, it)| t.lambda * it.payment).sum();
        prop_assert!(rel(spent, s.budget()) < 1e-9);
        prop_assert!(m.items.windows(2).all(|w| w[1].epsilon <= w[0].epsilon * (1.0 + 1e-12)));
    }

    #[test]
    fn incomplete_menu_satisfies_all_constraints(s in scenario_strategy()) {
        let m = solve_incomplete(&s);
        let k = s.k();
        let report = check_constraints(&m, &s).unwrap();
        let scale = s.budget().max(1.0);

        // Budget exhausted, top participation tight.
        prop_assert!(report.budget_residual.abs() < 1e-9 * scale);
        let top = &m.items[k - 1];
        prop_assert!(rel(top.payment, s.types()[k - 1].theta * top.epsilon) < 1e-9);

        // All participation and truthfulness inequalities.
        prop_assert!(report.ir_residuals.iter().all(|&r| r > -1e-9 * scale));
        for (i, row) in report.ic_matrix.iter().enumerate() {
            let own = row[i];
            prop_assert!(row.iter().all(|&u| u <= own + 1e-9 * scale));
        }

        // Adjacent downward truthfulness binds with equality.
        for i in 0..k - 1 {
            let theta = s.types()[i].theta;
            let own = utility(&m.items[i], theta);
            let next = utility(&m.items[i + 1], theta);
            prop_assert!((own - next).abs() < 1e-9 * scale);
        }
        prop_assert!(report.monotonic);
    }

    #[test]
    fn information_has_nonnegative_price(s in scenario_strategy()) {
        prop_assert!(accuracy_ratio(&s) >= 1.0 - 1e-12);
    }

    #[test]
    fn alpha_scales_inversely_with_budget(s in scenario_strategy(), c in 1.5f64..10.0) {
        let scaled = s.with_budget(s.budget() * c).unwrap();
        for (m, ms) in [
            (solve_complete(&s), solve_complete(&scaled)),
            (solve_incomplete(&s), solve_incomplete(&scaled)),
        ] {
            for (a, b) in m.items.iter().zip(&ms.items) {
                prop_assert!(rel(b.epsilon, a.epsilon * c) < 1e-9);
            }
            prop_assert!(rel(alpha_of_menu(&ms, &scaled), alpha_of_menu(&m, &s) / c) < 1e-9);
        }
    }

    #[test]
    fn equal_thetas_collapse_the_regimes(
        theta in 0.1f64..100.0,
        lambdas in proptest::collection::vec(1.0f64..1000.0, 1..6),
        budget in 1.0f64..100_000.0,
    ) {
        let types: Vec<PuType> = lambdas.iter().map(|&l| PuType::new(theta, l).unwrap()).collect();
        let s = DiscreteScenario::new(budget, types, 1.0, 0.5).unwrap();
        let mc = solve_complete(&s);
        let mi = solve_incomplete(&s);
        for (a, b) in mc.items.iter().zip(&mi.items) {
            prop_assert!(rel(a.epsilon, b.epsilon) < 1e-9);
            prop_assert!(rel(a.payment, b.payment) < 1e-9);
        }
    }

    #[test]
    fn error_bound_at_predicted_alpha_matches_confidence(
        epsilons in proptest::collection::vec(0.01f64..50.0, 1..20),
        gamma in 0.1f64..100.0,
        delta in 0.01f64..0.99,
    ) {
        let n = epsilons.len();
        let ctx = SensingContext::new(gamma, delta, n).unwrap();
        let ppls: Vec<PplLevel> = epsilons.iter().map(|&e| PplLevel::new(e).unwrap()).collect();
        let alpha = predicted_accuracy(&ctx, &ppls).unwrap();
        let scales = calibrate_all(gamma, &ppls).unwrap();
        let bound = chebyshev_error_bound(&ctx, &scales, alpha).unwrap();
        prop_assert!((bound - (1.0 - delta)).abs() < 1e-9);
    }
}
