//! Shared generators and independent oracles for the integration tests.
//!
//! The oracles here use nalgebra's LU decomposition and plain enumeration so
//! they share no code path with the solvers under test.

#![allow(dead_code)]

use edgemig_core::cost_model::ConstPlusExpCost;
use edgemig_core::distance_mdp::{DistanceMdpSpec, DistancePolicy};
use edgemig_core::hex::{hex_distance, state_count, HexOffset};
use edgemig_core::hex_mdp::HexMdpSpec;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random cost satisfying the sign and monotonicity constraints.
pub fn random_cost(rng: &mut ChaCha8Rng) -> ConstPlusExpCost {
    let base: f64 = rng.random_range(0.05..1.6);
    let lin = if base <= 1.0 { -rng.random_range(0.0..2.0) } else { rng.random_range(0.0..0.5) };
    let konst = -lin + rng.random_range(0.0..2.0);
    ConstPlusExpCost::new(konst, lin, base)
}

pub fn random_distance_spec(rng: &mut ChaCha8Rng, n_max: usize) -> DistanceMdpSpec {
    let p: f64 = rng.random_range(0.02..0.6);
    let q: f64 = rng.random_range(0.0..(1.0 - p).min(0.6));
    DistanceMdpSpec {
        n_max,
        p0: rng.random_range(0.0..1.0),
        p,
        q,
        gamma: rng.random_range(0.05..0.995),
        migration_cost: random_cost(rng),
        transmission_cost: random_cost(rng),
    }
}

pub fn random_distance_policy(rng: &mut ChaCha8Rng, n_max: usize) -> DistancePolicy {
    let mut actions: Vec<usize> = (0..=n_max).collect();
    for d in 1..=n_max {
        if d == n_max || rng.random_bool(0.4) {
            let hi = if d == n_max { n_max } else { d + 1 };
            actions[d] = rng.random_range(0..hi);
        }
    }
    DistancePolicy::new(actions).unwrap()
}

pub fn random_hex_spec(rng: &mut ChaCha8Rng, n_max: usize, gamma: f64) -> HexMdpSpec {
    // concave non-decreasing costs, as the approximation theory assumes
    let cost = |rng: &mut ChaCha8Rng| {
        let base: f64 = rng.random_range(0.1..1.0);
        let lin = -rng.random_range(0.0..2.0);
        ConstPlusExpCost::new(-lin + rng.random_range(0.0..1.5), lin, base)
    };
    HexMdpSpec {
        n_max,
        move_prob: 1.0 / 6.0 - rng.random_range(0.0..1.0 / 6.0),
        gamma,
        migration_cost: cost(rng),
        transmission_cost: cost(rng),
    }
}

fn distance_next(spec: &DistanceMdpSpec, a: usize) -> Vec<(usize, f64)> {
    if a == 0 {
        vec![(0, 1.0 - spec.p0), (1, spec.p0)]
    } else {
        vec![(a - 1, spec.q), (a, 1.0 - spec.p - spec.q), (a + 1, spec.p)]
    }
}

/// `V = (I - gamma P)^{-1} C` via nalgebra LU.
pub fn oracle_evaluate_1d(spec: &DistanceMdpSpec, actions: &[usize]) -> Vec<f64> {
    let n = spec.n_max + 1;
    let mut m = DMatrix::<f64>::identity(n, n);
    let mut c = DVector::<f64>::zeros(n);
    for d in 0..n {
        let a = actions[d];
        c[d] = spec.migration_cost.eval(d - a) + spec.transmission_cost.eval(a);
        for (j, p) in distance_next(spec, a) {
            m[(d, j)] -= spec.gamma * p;
        }
    }
    m.lu().solve(&c).expect("I - gamma P is nonsingular").iter().copied().collect()
}

/// Standard policy iteration with linear-system evaluation, starting from
/// never-migrate and keeping the incumbent action unless strictly improved.
pub fn oracle_policy_iteration_1d(spec: &DistanceMdpSpec) -> (Vec<usize>, Vec<f64>) {
    let n = spec.n_max;
    let mut actions: Vec<usize> = (0..=n).collect();
    actions[n] = 0;
    loop {
        let v = oracle_evaluate_1d(spec, &actions);
        let q = |d: usize, a: usize| {
            spec.migration_cost.eval(d - a)
                + spec.transmission_cost.eval(a)
                + spec.gamma * distance_next(spec, a).iter().map(|&(j, p)| p * v[j]).sum::<f64>()
        };
        let mut changed = false;
        for d in 1..=n {
            let hi = if d == n { n - 1 } else { d };
            let mut best = actions[d];
            let mut best_q = q(d, best);
            for a in 0..=hi {
                let qa = q(d, a);
                if qa < best_q - 1e-12 * (1.0 + best_q.abs()) {
                    best = a;
                    best_q = qa;
                }
            }
            if best != actions[d] {
                actions[d] = best;
                changed = true;
            }
        }
        if !changed {
            return (actions, v);
        }
    }
}

/// Every deterministic policy with `a(0) = 0`, `a(d) <= d`, `a(N) < N`.
pub fn enumerate_distance_policies(n_max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0usize]];
    for d in 1..=n_max {
        let hi = if d == n_max { n_max - 1 } else { d };
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=hi).map(move |a| {
                    let mut p = prefix.clone();
                    p.push(a);
                    p
                })
            })
            .collect();
    }
    out
}

/// Finite-horizon backward induction on the hexagon MDP, enumerating all
/// actions with `ring(a) <= ring(s)` (and `< N` on ring N).
pub fn oracle_finite_horizon_2d(spec: &HexMdpSpec, horizon: usize) -> Vec<f64> {
    let n = spec.n_max as u32;
    let count = state_count(n);
    let states: Vec<HexOffset> = (0..count).map(HexOffset::from_linear_index).collect();
    let next = |a: HexOffset| -> Vec<(usize, f64)> {
        let mut stay = 1.0 - 6.0 * spec.move_prob;
        let mut out = Vec::new();
        for nb in a.neighbors() {
            if nb.ring > n {
                stay += spec.move_prob;
            } else {
                out.push((nb.linear_index(), spec.move_prob));
            }
        }
        out.push((a.linear_index(), stay));
        out
    };
    let mut v = vec![0.0; count];
    for _ in 0..horizon {
        let nv: Vec<f64> = states
            .iter()
            .map(|&s| {
                states
                    .iter()
                    .filter(|a| a.ring <= s.ring && (s.ring < n || a.ring < n))
                    .map(|&a| {
                        spec.migration_cost.eval(hex_distance(s, a) as usize)
                            + spec.transmission_cost.eval(a.ring as usize)
                            + spec.gamma * next(a).iter().map(|&(j, p)| p * v[j]).sum::<f64>()
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        v = nv;
    }
    v
}
