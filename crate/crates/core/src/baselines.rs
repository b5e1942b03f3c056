//! Comparison policies: never-migrate, always-migrate and myopic.

use alloc::string::String;
use alloc::vec::Vec;

use crate::distance_mdp::{argmin_smallest, DistanceMdpSpec, DistancePolicy, MdpError};
use crate::hex::{ring_start, state_count, HexOffset};
use crate::hex_mdp::{self, evaluate_policy_2d, ExactMethod, HexMdpSpec, HexPolicy, ValueTable2D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaselineKind {
    /// Stay put unless at the boundary ring, where the service moves to the
    /// user.
    NeverMigrate,
    /// Move the service to the user whenever they differ.
    AlwaysMigrate,
    /// Minimize the one-slot cost only.
    Myopic,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 3] = [BaselineKind::NeverMigrate, BaselineKind::AlwaysMigrate, BaselineKind::Myopic];

    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::NeverMigrate => "never",
            BaselineKind::AlwaysMigrate => "always",
            BaselineKind::Myopic => "myopic",
        }
    }
}

pub fn distance_baseline(spec: &DistanceMdpSpec, kind: BaselineKind) -> DistancePolicy {
    let n = spec.n_max;
    match kind {
        BaselineKind::NeverMigrate => DistancePolicy::never_migrate(n),
        BaselineKind::AlwaysMigrate => DistancePolicy::always_migrate(n),
        BaselineKind::Myopic => {
            let actions = (0..=n)
                .map(|d| {
                    argmin_smallest(
                        (0..=spec.action_bound(d))
                            .map(|a| spec.migration_cost.eval(d - a) + spec.transmission_cost.eval(a)),
                    )
                })
                .collect();
            DistancePolicy::new(actions).expect("myopic actions respect the action bounds")
        }
    }
}

pub fn hex_baseline(spec: &HexMdpSpec, kind: BaselineKind) -> HexPolicy {
    let n = spec.n_max;
    let count = state_count(n as u32);
    let actions: Vec<HexOffset> = (0..count)
        .map(|k| {
            let s = HexOffset::from_linear_index(k);
            let at_boundary = s.ring as usize >= n;
            match kind {
                BaselineKind::NeverMigrate if at_boundary => HexOffset::ORIGIN,
                BaselineKind::NeverMigrate => s,
                BaselineKind::AlwaysMigrate => HexOffset::ORIGIN,
                BaselineKind::Myopic => {
                    let bound = if at_boundary { ring_start(n as u32) } else { ring_start(s.ring + 1) };
                    let best = argmin_smallest(
                        (0..bound).map(|a| spec.one_slot_cost(s, HexOffset::from_linear_index(a))),
                    );
                    HexOffset::from_linear_index(best)
                }
            }
        })
        .collect();
    HexPolicy::new(n, actions).expect("baseline actions respect the action bounds")
}

/// Exact costs of one named policy.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyCosts {
    pub name: String,
    pub values: ValueTable2D,
    pub mean: f64,
    /// `mean - optimal mean`.
    pub gap: f64,
    /// Largest per-state excess over the optimum.
    pub max_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyComparison {
    pub optimal: PolicyCosts,
    pub policies: Vec<PolicyCosts>,
}

/// Evaluates each policy exactly and relates it to the optimal policy from
/// standard policy iteration.
pub fn compare_policies(spec: &HexMdpSpec, policies: &[(String, HexPolicy)]) -> Result<PolicyComparison, MdpError> {
    let exact = hex_mdp::solve_exact(spec, ExactMethod::PolicyIteration, 1e-9)?;
    let opt_mean = exact.values.mean();
    let optimal = PolicyCosts {
        name: String::from("optimal"),
        mean: opt_mean,
        values: exact.values.clone(),
        gap: 0.0,
        max_gap: 0.0,
    };
    let mut out = Vec::with_capacity(policies.len());
    for (name, policy) in policies {
        let values = evaluate_policy_2d(spec, policy)?;
        let mean = values.mean();
        let max_gap = values
            .as_slice()
            .iter()
            .zip(exact.values.as_slice())
            .map(|(v, o)| v - o)
            .fold(f64::NEG_INFINITY, f64::max);
        out.push(PolicyCosts { name: name.clone(), values, mean, gap: mean - opt_mean, max_gap });
    }
    Ok(PolicyComparison { optimal, policies: out })
}
