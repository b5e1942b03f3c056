//! The 2-D offset MDP on hexagon cells.
//!
//! The state is the user's offset from the service, truncated to rings
//! `0..=N`. An action moves the service, which moves the offset to any state
//! `a` with `ring(a) <= ring(s)`; the user then steps to each of the six
//! neighbors of `a` with probability `r`. Neighbors beyond ring `N` fold
//! their mass back onto `a`, which only matters for policies that do not
//! migrate at ring `N`.

use alloc::vec;
use alloc::vec::Vec;

use crate::cost_model::ConstPlusExpCost;
use crate::distance_mdp::{self, argmin_smallest, DistanceMdpSpec, DistancePolicy, MdpError, ValueTable1D};
use crate::hex::{ring_start, state_count, HexOffset};
use crate::linalg::{self, DenseMatrix};
use crate::math::abs;

/// Hexagon MDP parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexMdpSpec {
    pub n_max: usize,
    /// Probability of moving to each particular neighbor per slot.
    pub move_prob: f64,
    pub gamma: f64,
    pub migration_cost: ConstPlusExpCost,
    pub transmission_cost: ConstPlusExpCost,
}

impl HexMdpSpec {
    pub fn validate(&self) -> Result<(), MdpError> {
        let bad = |field, reason| Err(MdpError::InvalidSpec { field, reason });
        if self.n_max < 2 {
            return bad("n_max", "must be at least 2");
        }
        if !(self.move_prob >= 0.0 && 6.0 * self.move_prob <= 1.0 + 1e-12) {
            return bad("move_prob", "must lie in [0, 1/6]");
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("gamma", "must lie in (0, 1)");
        }
        if self.migration_cost.validate().is_err() {
            return bad("migration_cost", "violates the sign/monotonicity constraints");
        }
        if self.transmission_cost.validate().is_err() {
            return bad("transmission_cost", "violates the sign/monotonicity constraints");
        }
        Ok(())
    }

    /// `c_m(|s - a|) + c_d(|a|)`.
    pub fn one_slot_cost(&self, s: HexOffset, a: HexOffset) -> f64 {
        self.migration_cost.eval(crate::hex::hex_distance(s, a) as usize)
            + self.transmission_cost.eval(a.ring as usize)
    }

    /// Number of states excluding the origin, `3N^2 + 3N`.
    pub fn non_origin_states(&self) -> usize {
        state_count(self.n_max as u32) - 1
    }
}

/// Successor distribution from the intermediate offset `a`.
pub fn transition_distribution(spec: &HexMdpSpec, a: HexOffset) -> Vec<(HexOffset, f64)> {
    let r = spec.move_prob;
    let mut stay = 1.0 - 6.0 * r;
    let mut out = Vec::with_capacity(7);
    for nb in a.neighbors() {
        if nb.ring as usize > spec.n_max {
            stay += r;
        } else {
            out.push((nb, r));
        }
    }
    out.insert(0, (a, stay));
    out
}

/// Ring-major enumeration of the offsets in rings `0..=N` plus the
/// precomputed tables the solvers share.
#[derive(Debug, Clone)]
pub struct HexStateSpace {
    n_max: usize,
    states: Vec<HexOffset>,
    /// Row-major hop distances between states.
    dist: Vec<u8>,
}

impl HexStateSpace {
    pub fn new(n_max: usize) -> Self {
        let count = state_count(n_max as u32);
        let states: Vec<HexOffset> = (0..count).map(HexOffset::from_linear_index).collect();
        let axial: Vec<_> = states.iter().map(|s| s.to_axial()).collect();
        let mut dist = vec![0u8; count * count];
        for i in 0..count {
            for j in 0..count {
                dist[i * count + j] = axial[i].distance(axial[j]) as u8;
            }
        }
        Self { n_max, states, dist }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[HexOffset] {
        &self.states
    }

    pub fn distance(&self, i: usize, j: usize) -> usize {
        self.dist[i * self.states.len() + j] as usize
    }

    /// Number of leading states that are legal actions from state `i` when
    /// actions are limited to rings no farther out than the state itself.
    fn inner_action_bound(&self, i: usize) -> usize {
        let ring = self.states[i].ring;
        if ring as usize >= self.n_max {
            ring_start(self.n_max as u32)
        } else {
            ring_start(ring + 1)
        }
    }

    fn transitions(&self, spec: &HexMdpSpec) -> Vec<Vec<(usize, f64)>> {
        self.states
            .iter()
            .map(|&s| {
                transition_distribution(spec, s).into_iter().map(|(t, p)| (t.linear_index(), p)).collect()
            })
            .collect()
    }
}

/// Stationary 2-D policy, one action per offset in ring-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HexPolicy {
    n_max: usize,
    actions: Vec<HexOffset>,
}

impl HexPolicy {
    pub fn new(n_max: usize, actions: Vec<HexOffset>) -> Result<Self, MdpError> {
        if actions.len() != state_count(n_max as u32) {
            return Err(MdpError::InvalidPolicy("one action per state is required"));
        }
        for (k, &a) in actions.iter().enumerate() {
            let s = HexOffset::from_linear_index(k);
            if a.ring > s.ring || a.ring as usize > n_max {
                return Err(MdpError::InvalidPolicy("an action moves the service away from the user"));
            }
            if s.ring as usize == n_max && a.ring as usize >= n_max {
                return Err(MdpError::InvalidPolicy("ring-N states must migrate inwards"));
            }
            if HexOffset::new(a.ring, a.index).is_none() {
                return Err(MdpError::InvalidPolicy("action is not a valid offset"));
            }
        }
        Ok(Self { n_max, actions })
    }

    pub(crate) fn from_parts(n_max: usize, actions: Vec<HexOffset>) -> Self {
        Self { n_max, actions }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn action(&self, s: HexOffset) -> HexOffset {
        self.actions[s.linear_index()]
    }

    pub fn actions(&self) -> &[HexOffset] {
        &self.actions
    }
}

/// `V(e)` for every offset in ring-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable2D {
    values: Vec<f64>,
}

impl ValueTable2D {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn get(&self, s: HexOffset) -> f64 {
        self.values[s.linear_index()]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Uniform average over all states.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Exact evaluation of `policy` by solving the `(M+1)`-state balance
/// equations.
pub fn evaluate_policy_2d(spec: &HexMdpSpec, policy: &HexPolicy) -> Result<ValueTable2D, MdpError> {
    spec.validate()?;
    let space = HexStateSpace::new(spec.n_max);
    evaluate_in(spec, &space, &space.transitions(spec), policy)
}

fn evaluate_in(
    spec: &HexMdpSpec,
    space: &HexStateSpace,
    trans: &[Vec<(usize, f64)>],
    policy: &HexPolicy,
) -> Result<ValueTable2D, MdpError> {
    if policy.n_max != spec.n_max {
        return Err(MdpError::InvalidPolicy("policy size does not match n_max"));
    }
    let n = space.len();
    let mut a = DenseMatrix::identity(n);
    let mut b = vec![0.0; n];
    for i in 0..n {
        let act = policy.actions[i];
        let ai = act.linear_index();
        b[i] = spec.migration_cost.eval(space.distance(i, ai)) + spec.transmission_cost.eval(act.ring as usize);
        for &(j, p) in &trans[ai] {
            a.add(i, j, -spec.gamma * p);
        }
    }
    linalg::solve(a, b).map(ValueTable2D::new).ok_or(MdpError::SingularSegment { segment: 0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactMethod {
    ValueIteration,
    PolicyIteration,
}

/// Which actions the exact solvers search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionSpace {
    /// `ring(a) <= ring(s)`, and `ring(a) < N` at ring `N`.
    NoFartherThanState,
    /// Any state in rings `0..N`, regardless of the current ring.
    AllInner,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    pub policy: HexPolicy,
    pub values: ValueTable2D,
    pub iterations: usize,
}

/// Dense table of one-slot costs and expected continuations over the action
/// prefix of each state.
struct Bellman<'a> {
    spec: &'a HexMdpSpec,
    space: &'a HexStateSpace,
    trans: Vec<Vec<(usize, f64)>>,
    bounds: Vec<usize>,
    cm: Vec<f64>,
    cd: Vec<f64>,
}

impl<'a> Bellman<'a> {
    fn new(spec: &'a HexMdpSpec, space: &'a HexStateSpace, actions: ActionSpace) -> Self {
        let bounds = (0..space.len())
            .map(|i| match actions {
                ActionSpace::NoFartherThanState => space.inner_action_bound(i),
                ActionSpace::AllInner => ring_start(spec.n_max as u32),
            })
            .collect();
        let cm = (0..=2 * spec.n_max).map(|x| spec.migration_cost.eval(x)).collect();
        let cd = (0..=spec.n_max).map(|x| spec.transmission_cost.eval(x)).collect();
        Self { spec, space, trans: space.transitions(spec), bounds, cm, cd }
    }

    fn continuation(&self, values: &[f64]) -> Vec<f64> {
        self.trans.iter().map(|row| row.iter().map(|&(j, p)| p * values[j]).sum()).collect()
    }

    fn scores<'b>(&'b self, i: usize, cont: &'b [f64]) -> impl Iterator<Item = f64> + Clone + 'b {
        (0..self.bounds[i]).map(move |a| {
            self.cm[self.space.distance(i, a)]
                + self.cd[self.space.states[a].ring as usize]
                + self.spec.gamma * cont[a]
        })
    }

    fn greedy(&self, values: &[f64]) -> HexPolicy {
        let cont = self.continuation(values);
        let actions = (0..self.space.len())
            .map(|i| self.space.states[argmin_smallest(self.scores(i, &cont))])
            .collect();
        HexPolicy::from_parts(self.spec.n_max, actions)
    }

    /// `max_s |V(s) - min_a Q(s, a)|`.
    fn residual(&self, values: &[f64]) -> f64 {
        let cont = self.continuation(values);
        (0..self.space.len())
            .map(|i| abs(values[i] - self.scores(i, &cont).fold(f64::INFINITY, f64::min)))
            .fold(0.0, f64::max)
    }
}

/// Optimal policy and values of the full 2-D MDP by standard value or policy
/// iteration, searching actions no farther out than the current ring.
pub fn solve_exact(spec: &HexMdpSpec, method: ExactMethod, tolerance: f64) -> Result<ExactSolution, MdpError> {
    solve_exact_with(spec, method, tolerance, ActionSpace::NoFartherThanState)
}

pub fn solve_exact_with(
    spec: &HexMdpSpec,
    method: ExactMethod,
    tolerance: f64,
    actions: ActionSpace,
) -> Result<ExactSolution, MdpError> {
    spec.validate()?;
    if !(tolerance > 0.0) {
        return Err(MdpError::InvalidSpec { field: "tolerance", reason: "must be positive" });
    }
    let space = HexStateSpace::new(spec.n_max);
    let bellman = Bellman::new(spec, &space, actions);
    match method {
        ExactMethod::PolicyIteration => {
            let cap = 10 * space.len();
            let mut policy = bellman.greedy(&vec![0.0; space.len()]);
            for iteration in 1..=cap {
                let values = evaluate_in(spec, &space, &bellman.trans, &policy)?;
                let next = bellman.greedy(values.as_slice());
                if next == policy {
                    return Ok(ExactSolution { policy, values, iterations: iteration });
                }
                policy = next;
            }
            Err(MdpError::NonConvergence { iterations: cap })
        }
        ExactMethod::ValueIteration => {
            let cap = 10_000_000;
            let threshold = tolerance * (1.0 - spec.gamma) / spec.gamma;
            let mut values = vec![0.0; space.len()];
            for iteration in 1..=cap {
                let cont = bellman.continuation(&values);
                let mut delta: f64 = 0.0;
                let next: Vec<f64> = (0..space.len())
                    .map(|i| {
                        let best = bellman.scores(i, &cont).fold(f64::INFINITY, f64::min);
                        delta = delta.max(abs(best - values[i]));
                        best
                    })
                    .collect();
                values = next;
                if delta < threshold {
                    let policy = bellman.greedy(&values);
                    return Ok(ExactSolution { policy, values: ValueTable2D::new(values), iterations: iteration });
                }
            }
            Err(MdpError::NonConvergence { iterations: cap })
        }
    }
}

/// Largest Bellman residual of `values` under the ring-limited action space.
pub fn bellman_residual(spec: &HexMdpSpec, values: &ValueTable2D) -> f64 {
    let space = HexStateSpace::new(spec.n_max);
    Bellman::new(spec, &space, ActionSpace::NoFartherThanState).residual(values.as_slice())
}

/// Distance MDP that approximates the hexagon walk: `p0 = 6r`,
/// `p = 2.5r`, `q = 1.5r`.
pub fn build_approx_distance_spec(spec: &HexMdpSpec) -> DistanceMdpSpec {
    let r = spec.move_prob;
    DistanceMdpSpec {
        n_max: spec.n_max,
        p0: 6.0 * r,
        p: 2.5 * r,
        q: 1.5 * r,
        gamma: spec.gamma,
        migration_cost: spec.migration_cost,
        transmission_cost: spec.transmission_cost,
    }
}

/// First state of `ring` (in index order) at hop distance `hops` from `s`.
pub fn shortest_path_target(s: HexOffset, ring: u32) -> HexOffset {
    let hops = s.ring.abs_diff(ring);
    if ring == 0 {
        return HexOffset::ORIGIN;
    }
    let sa = s.to_axial();
    (0..6 * ring)
        .map(|index| HexOffset { ring, index })
        .find(|t| t.to_axial().distance(sa) == hops)
        .expect("every ring is reachable along a shortest path")
}

/// Lifts a distance policy: a state in ring `i` with `a(i) = i'` migrates to
/// the lowest-indexed ring-`i'` state at hop distance `i - i'`.
pub fn map_1d_policy_to_2d(dpolicy: &DistancePolicy) -> HexPolicy {
    let n_max = dpolicy.n_max();
    let actions = (0..state_count(n_max as u32))
        .map(|k| {
            let s = HexOffset::from_linear_index(k);
            let target = dpolicy.action(s.ring as usize) as u32;
            if target == s.ring {
                s
            } else {
                shortest_path_target(s, target)
            }
        })
        .collect();
    HexPolicy::from_parts(n_max, actions)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxSolution {
    pub distance_spec: DistanceMdpSpec,
    pub distance_policy: DistancePolicy,
    pub distance_values: ValueTable1D,
    pub policy: HexPolicy,
}

/// Solves the approximating distance MDP and maps its policy onto the hexagon.
pub fn approximate_policy(spec: &HexMdpSpec) -> Result<ApproxSolution, MdpError> {
    spec.validate()?;
    let distance_spec = build_approx_distance_spec(spec);
    let (distance_policy, distance_values) = distance_mdp::solve_optimal(&distance_spec)?;
    let policy = map_1d_policy_to_2d(&distance_policy);
    Ok(ApproxSolution { distance_spec, distance_policy, distance_values, policy })
}

/// `max_{0 <= x <= N-2} c_m(x + 2) - c_m(x)`.
pub fn migration_cost_step(spec: &HexMdpSpec) -> f64 {
    (0..=spec.n_max.saturating_sub(2))
        .map(|x| spec.migration_cost.eval(x + 2) - spec.migration_cost.eval(x))
        .fold(0.0, f64::max)
}

/// Worst-case excess cost of the mapped distance policy over the optimum,
/// `gamma r k / (1 - gamma)`.
pub fn error_bound(spec: &HexMdpSpec) -> f64 {
    spec.gamma * spec.move_prob * migration_cost_step(spec) / (1.0 - spec.gamma)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n_max: usize, r: f64) -> HexMdpSpec {
        HexMdpSpec {
            n_max,
            move_prob: r,
            gamma: 0.9,
            migration_cost: ConstPlusExpCost::new(1.5, -0.5, 0.8),
            transmission_cost: ConstPlusExpCost::new(1.0, -1.0, 0.8),
        }
    }

    #[test]
    fn transition_examples() {
        let s = spec(3, 1.0 / 6.0);
        let d = transition_distribution(&s, HexOffset::new(1, 0).unwrap());
        assert!(d[0].1.abs() < 1e-15);
        let s = spec(3, 0.1);
        let d = transition_distribution(&s, HexOffset::new(1, 3).unwrap());
        assert_eq!(d.len(), 7);
        assert!((d[0].1 - 0.4).abs() < 1e-15);
        assert!(d[1..].iter().all(|&(_, p)| p == 0.1));
        // ring-N corner: three neighbors fall outside
        let d = transition_distribution(&s, HexOffset::new(3, 0).unwrap());
        assert_eq!(d.len(), 4);
        assert!((d[0].1 - 0.7).abs() < 1e-15);
        assert!((d.iter().map(|x| x.1).sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn approx_spec_parameters() {
        let d = build_approx_distance_spec(&spec(10, 0.1));
        assert!((d.p0 - 0.6).abs() < 1e-15 && (d.p - 0.25).abs() < 1e-15 && (d.q - 0.15).abs() < 1e-15);
        let d = build_approx_distance_spec(&spec(10, 1.0 / 6.0));
        assert!((d.p0 - 1.0).abs() < 1e-15);
        assert!((d.p + d.q - 2.0 / 3.0).abs() < 1e-15);
        assert!(d.validate().is_ok());
        let d = build_approx_distance_spec(&spec(10, 0.0));
        assert_eq!(distance_mdp::phi_constants(&d), Err(MdpError::DegenerateSpec));
    }

    #[test]
    fn mapping_examples() {
        let mut acts: Vec<usize> = (0..=3).collect();
        acts[3] = 2;
        let m = map_1d_policy_to_2d(&DistancePolicy::new(acts).unwrap());
        assert_eq!(m.action(HexOffset::new(3, 2).unwrap()), HexOffset::new(2, 1).unwrap());
        let m = map_1d_policy_to_2d(&DistancePolicy::always_migrate(4));
        assert!(m.actions().iter().all(|&a| a == HexOffset::ORIGIN));
    }

    #[test]
    fn error_bound_examples() {
        let s = spec(10, 0.1);
        assert!((migration_cost_step(&s) - 1.18).abs() < 1e-12);
        assert!((error_bound(&s) - 1.062).abs() < 1e-12);
        let mut z = s;
        z.migration_cost = ConstPlusExpCost::zero();
        assert_eq!(error_bound(&z), 0.0);
        let mut g = s;
        g.migration_cost = ConstPlusExpCost::new(0.0, 1.0, 1.3);
        let want = g.migration_cost.eval(10) - g.migration_cost.eval(8);
        assert!((migration_cost_step(&g) - want).abs() < 1e-12);
    }

    #[test]
    fn state_count_matches() {
        assert_eq!(spec(10, 0.1).non_origin_states(), 330);
        assert_eq!(HexStateSpace::new(2).len(), 19);
    }

    #[test]
    fn policy_validation() {
        let ok = map_1d_policy_to_2d(&DistancePolicy::never_migrate(3));
        assert!(HexPolicy::new(3, ok.actions().to_vec()).is_ok());
        let mut bad = ok.actions().to_vec();
        bad[1] = HexOffset::new(2, 0).unwrap();
        assert!(HexPolicy::new(3, bad).is_err());
        let stay: Vec<HexOffset> = (0..37).map(HexOffset::from_linear_index).collect();
        assert!(HexPolicy::new(3, stay).is_err());
    }
}
