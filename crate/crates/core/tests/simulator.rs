mod common;

use common::*;
use edgemig_core::hex::HexOffset;
use edgemig_core::hex_mdp::{evaluate_policy_2d, solve_exact, ExactMethod};
use edgemig_core::simulator::*;

#[test]
fn monte_carlo_matches_exact_value_of_optimal_policy() {
    let mut r = rng(31);
    let spec = random_hex_spec(&mut r, 3, 0.9);
    let sol = solve_exact(&spec, ExactMethod::PolicyIteration, 1e-10).unwrap();
    let exact = evaluate_policy_2d(&spec, &sol.policy).unwrap();
    let horizon = horizon_for_tolerance(&spec, 1e-6);
    let start = HexOffset::new(2, 3).unwrap();
    let mc = simulate_random_walk(&spec, &sol.policy, start, horizon, 100_000, 5);
    let want = exact.get(start);
    assert!((mc.mean - want).abs() <= 3.0 * mc.std_error, "{} +- {} vs {want}", mc.mean, mc.std_error);
}

#[test]
fn estimation_error_shrinks_with_more_data() {
    let r0 = 0.08;
    let err = |entities: usize, slots: usize| -> f64 {
        (0..5)
            .map(|seed| {
                let trace = synthetic_population(entities, slots, r0, 4, 100 + seed);
                (estimate_r(&trace, slots - 1, slots - 1).unwrap() - r0).abs()
            })
            .sum::<f64>()
            / 5.0
    };
    let small = err(50, 20);
    let large = err(1000, 120);
    assert!(large < small, "small {small} large {large}");
    assert!(large < 0.005);
}

#[test]
fn proposed_policy_beats_baselines_on_synthetic_walks() {
    for (r0, seed) in [(0.03, 1), (0.1, 2)] {
        let trace = synthetic_population(300, 90, r0, 4, seed);
        let config = TraceSimConfig {
            update_interval_slots: 1,
            window_slots: 60,
            n_max: 10,
            gamma: 0.9,
            r_t: 1.5,
            r_p: 1.5,
            cost_base: DEFAULT_COST_BASE,
            policies: PolicyKind::ALL.to_vec(),
        };
        let report = run_trace_simulation(&trace, &config).unwrap();
        for red in &report.reductions {
            assert!(
                red.mean_difference >= -3.0 * red.difference_std_error,
                "r0={r0} {}: {} +- {}",
                red.baseline.name(),
                red.mean_difference,
                red.difference_std_error
            );
        }
    }
}
