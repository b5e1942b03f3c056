//! The 1-D distance MDP.
//!
//! States are user-service distances `d in [0, N]` observed at the start of a
//! slot. An action picks the post-migration distance `a(d) <= d`; the user then
//! moves from the intermediate state `a`: from 0 it leaves with probability
//! `p0`, elsewhere it moves one step out with `p` and one step in with `q`.
//!
//! For a fixed policy the discounted cost obeys a second-order linear
//! difference equation between consecutive migration states, so `V(d)` has
//! the form `A m1^d + B m2^d + D + H theta^d` on each such segment.
//! [`closed_form_value`] solves the two constants per segment in `O(N)` and
//! [`modified_policy_iteration`] uses it as the evaluation step of policy
//! iteration.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::cost_model::ConstPlusExpCost;
use crate::linalg::{self, DenseMatrix};
use crate::math::{abs, powi, sqrt};

/// `|1 - phi1/theta - phi2*theta|` below this is treated as the resonant case.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;
/// Shift applied to `theta` in the resonant case.
pub const THETA_PERTURBATION: f64 = 1e-7;
/// Relative slack under which two Q-values count as tied.
pub(crate) const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MdpError {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidSpec { field: &'static str, reason: &'static str },
    #[error("action {action} is not allowed in state {state}")]
    InvalidAction { state: usize, action: usize },
    #[error("invalid policy: {0}")]
    InvalidPolicy(&'static str),
    #[error("p = 0: the characteristic roots are undefined")]
    DegenerateSpec,
    #[error("segment {segment} coefficient system is singular")]
    SingularSegment { segment: usize },
    #[error("no convergence after {iterations} iterations")]
    NonConvergence { iterations: usize },
}

/// Distance MDP parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceMdpSpec {
    /// Maximum allowed distance; migration is forced at `n_max`.
    pub n_max: usize,
    pub p0: f64,
    pub p: f64,
    pub q: f64,
    pub gamma: f64,
    pub migration_cost: ConstPlusExpCost,
    pub transmission_cost: ConstPlusExpCost,
}

fn is_prob(x: f64) -> bool {
    x.is_finite() && (0.0..=1.0).contains(&x)
}

impl DistanceMdpSpec {
    /// Uniform 1-D random walk that steps left or right with probability `r1`
    /// each: `p = q = r1`, `p0 = 2 r1`.
    pub fn from_random_walk_1d(
        n_max: usize,
        r1: f64,
        gamma: f64,
        migration_cost: ConstPlusExpCost,
        transmission_cost: ConstPlusExpCost,
    ) -> Self {
        Self { n_max, p0: 2.0 * r1, p: r1, q: r1, gamma, migration_cost, transmission_cost }
    }

    pub fn validate(&self) -> Result<(), MdpError> {
        let bad = |field, reason| Err(MdpError::InvalidSpec { field, reason });
        if self.n_max < 2 {
            return bad("n_max", "must be at least 2");
        }
        if !is_prob(self.p0) {
            return bad("p0", "must lie in [0, 1]");
        }
        if !is_prob(self.p) {
            return bad("p", "must lie in [0, 1]");
        }
        if !is_prob(self.q) {
            return bad("q", "must lie in [0, 1]");
        }
        if self.p + self.q > 1.0 + 1e-12 {
            return bad("q", "p + q must not exceed 1");
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

    /// Successor distribution from the intermediate state `a`. Mass that would
    /// leave `[0, N]` stays put; valid policies never reach that case.
    pub fn transitions(&self, a: usize) -> [(usize, f64); 3] {
        if a == 0 {
            [(0, 1.0 - self.p0), (1, self.p0), (0, 0.0)]
        } else if a >= self.n_max {
            [(a - 1, self.q), (a, 1.0 - self.q), (a, 0.0)]
        } else {
            [(a - 1, self.q), (a, 1.0 - self.p - self.q), (a + 1, self.p)]
        }
    }

    /// `c_m(d - a) + c_d(a)`.
    pub fn one_slot_cost(&self, d: usize, a: usize) -> Result<f64, MdpError> {
        if a > d || d > self.n_max {
            return Err(MdpError::InvalidAction { state: d, action: a });
        }
        Ok(self.migration_cost.eval(d - a) + self.transmission_cost.eval(a))
    }

    /// `C_a(d) + gamma * E[V(next) | a]`.
    pub fn q_value(&self, values: &[f64], d: usize, a: usize) -> f64 {
        let future: f64 = self.transitions(a).iter().map(|&(j, pr)| pr * values[j]).sum();
        self.migration_cost.eval(d - a) + self.transmission_cost.eval(a) + self.gamma * future
    }

    /// Actions allowed in state `d`: `0..=d`, except `0..N` at `d = N`.
    pub fn action_bound(&self, d: usize) -> usize {
        if d >= self.n_max {
            self.n_max - 1
        } else {
            d
        }
    }
}

/// Deterministic stationary policy `d -> a(d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistancePolicy {
    actions: Vec<usize>,
}

impl DistancePolicy {
    /// `actions[d]` is `a(d)` for `d = 0..=N`.
    pub fn new(actions: Vec<usize>) -> Result<Self, MdpError> {
        let n = actions.len();
        if n < 3 {
            return Err(MdpError::InvalidPolicy("needs at least three states"));
        }
        if actions[0] != 0 {
            return Err(MdpError::InvalidPolicy("a(0) must be 0"));
        }
        if let Some(d) = (0..n).find(|&d| actions[d] > d) {
            return Err(MdpError::InvalidAction { state: d, action: actions[d] });
        }
        if actions[n - 1] >= n - 1 {
            return Err(MdpError::InvalidPolicy("a(N) must migrate"));
        }
        Ok(Self { actions })
    }

    /// Migrate to distance 0 from every nonzero state.
    pub fn always_migrate(n_max: usize) -> Self {
        Self { actions: vec![0; n_max + 1] }
    }

    /// Stay everywhere except the forced migration to 0 at `N`.
    pub fn never_migrate(n_max: usize) -> Self {
        let mut actions: Vec<usize> = (0..=n_max).collect();
        actions[n_max] = 0;
        Self { actions }
    }

    pub fn n_max(&self) -> usize {
        self.actions.len() - 1
    }

    pub fn action(&self, d: usize) -> usize {
        self.actions[d]
    }

    pub fn actions(&self) -> &[usize] {
        &self.actions
    }

    /// States `d >= 1` with `a(d) != d`, in increasing order.
    pub fn migration_states(&self) -> Vec<usize> {
        (1..self.actions.len()).filter(|&d| self.actions[d] != d).collect()
    }
}

/// `V(d)` for `d = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable1D {
    values: Vec<f64>,
}

impl ValueTable1D {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn get(&self, d: usize) -> f64 {
        self.values[d]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs_diff(&self, other: &ValueTable1D) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| abs(a - b)).fold(0.0, f64::max)
    }
}

/// Constants shared by every segment of the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiConstants {
    pub phi0: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
    pub phi4: f64,
    /// Larger characteristic root; always above 1.
    pub m1: f64,
    /// Smaller characteristic root; in `[0, 1)`.
    pub m2: f64,
    pub d_const: f64,
    pub h_const: f64,
    /// Exponential base of the transmission cost actually used, after any
    /// perturbation.
    pub theta: f64,
    /// `theta` coincided with a characteristic root and was shifted.
    pub degenerate: bool,
}

/// Coefficients on one segment `[start, end]` between migration states.
///
/// Stored relative to the segment ends, `V(d) = alpha m1^(d-end) +
/// beta m2^(d-start) + D + H theta^d`, which keeps both basis terms at most 1
/// on the segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub alpha: f64,
    pub beta: f64,
}

impl Segment {
    /// `(A_k, B_k)` in the `A m1^d + B m2^d` normalization. `B_k` is not finite
    /// when `m2 = 0` and the segment starts above 0.
    pub fn absolute_coefficients(&self, phi: &PhiConstants) -> (f64, f64) {
        (
            self.alpha * powi(phi.m1, -(self.end as i64)),
            self.beta * powi(phi.m2, -(self.start as i64)),
        )
    }

    fn basis(&self, phi: &PhiConstants, d: usize) -> (f64, f64, f64) {
        (
            powi(phi.m1, d as i64 - self.end as i64),
            powi(phi.m2, d as i64 - self.start as i64),
            phi.d_const + phi.h_const * powi(phi.theta, d as i64),
        )
    }

    pub fn eval(&self, phi: &PhiConstants, d: usize) -> f64 {
        let (u, w, p) = self.basis(phi, d);
        self.alpha * u + self.beta * w + p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormCoeffs {
    pub phi: PhiConstants,
    /// One segment per migration state `n_k`; the last ends at `N`.
    pub segments: Vec<Segment>,
}

/// Computes `phi0..phi4`, the characteristic roots, `D` and `H`.
pub fn phi_constants(spec: &DistanceMdpSpec) -> Result<PhiConstants, MdpError> {
    spec.validate()?;
    if spec.p == 0.0 {
        return Err(MdpError::DegenerateSpec);
    }
    let g = spec.gamma;
    let denom = 1.0 - g * (1.0 - spec.p - spec.q);
    let phi1 = g * spec.q / denom;
    let phi2 = g * spec.p / denom;
    let phi3 = spec.transmission_cost.const_term / denom;
    let phi4 = spec.transmission_cost.lin_term / denom;
    let phi0 = g * spec.p0 / (1.0 - g * (1.0 - spec.p0));
    let disc = sqrt((1.0 - 4.0 * phi1 * phi2).max(0.0));
    let m1 = (1.0 + disc) / (2.0 * phi2);
    // 2 phi1 / (1 + disc) equals (1 - disc) / (2 phi2) without the cancellation
    let m2 = 2.0 * phi1 / (1.0 + disc);
    let d_const = phi3 / (1.0 - phi1 - phi2);

    let resonance = |theta: f64| 1.0 - phi1 / theta - phi2 * theta;
    let mut theta = spec.transmission_cost.base;
    let mut degenerate = false;
    let h_const = if phi4 == 0.0 || theta == 0.0 {
        0.0
    } else {
        if abs(resonance(theta)) < DEGENERACY_TOLERANCE {
            degenerate = true;
            let up = theta + THETA_PERTURBATION;
            let down = theta - THETA_PERTURBATION;
            let keeps_sign = |t: f64| {
                ConstPlusExpCost { base: t, ..spec.transmission_cost }.validate().is_ok()
                    && abs(resonance(t)) >= DEGENERACY_TOLERANCE
            };
            theta = if keeps_sign(up) { up } else { down };
        }
        phi4 / resonance(theta)
    };
    Ok(PhiConstants { phi0, phi1, phi2, phi3, phi4, m1, m2, d_const, h_const, theta, degenerate })
}

/// Linear form `ca * alpha + cb * beta + c0` in the current segment's unknowns.
#[derive(Debug, Clone, Copy)]
struct Affine {
    ca: f64,
    cb: f64,
    c0: f64,
}

impl Affine {
    fn constant(c0: f64) -> Self {
        Self { ca: 0.0, cb: 0.0, c0 }
    }

    fn scaled_add(self, k: f64, o: Affine) -> Self {
        Self { ca: self.ca + k * o.ca, cb: self.cb + k * o.cb, c0: self.c0 + k * o.c0 }
    }
}

/// Discounted cost of `policy` from the closed form, in `O(N)`.
pub fn closed_form_value(
    spec: &DistanceMdpSpec,
    policy: &DistancePolicy,
) -> Result<(ValueTable1D, ClosedFormCoeffs), MdpError> {
    let phi = phi_constants(spec)?;
    if policy.n_max() != spec.n_max {
        return Err(MdpError::InvalidPolicy("policy size does not match n_max"));
    }
    let n = spec.n_max;
    let cm = spec.migration_cost;
    let cd = ConstPlusExpCost { base: phi.theta, ..spec.transmission_cost };

    let mut values = vec![0.0; n + 1];
    let mut segments = Vec::new();
    let mut start = 0usize;
    for (k, end) in policy.migration_states().into_iter().enumerate() {
        let mut seg = Segment { start, end, alpha: 0.0, beta: 0.0 };
        let known_below = if k == 0 { 0 } else { start + 1 };
        let value_at = |x: usize| -> Affine {
            if x < known_below {
                Affine::constant(values[x])
            } else {
                let (u, w, p) = seg.basis(&phi, x);
                Affine { ca: u, cb: w, c0: p }
            }
        };

        // first row: d = 0 balance on the first segment, continuity afterwards
        let (row1, rhs1) = if k == 0 {
            (value_at(0).scaled_add(-phi.phi0, value_at(1)), 0.0)
        } else {
            let (u, w, p) = seg.basis(&phi, start);
            (Affine { ca: u, cb: w, c0: p }, values[start])
        };

        // second row: the migration at `end`
        let target = policy.action(end);
        let (row2, rhs2) = if policy.action(target) == target {
            (value_at(end).scaled_add(-1.0, value_at(target)), cm.eval(end - target))
        } else {
            // the target itself migrates, so use its balance row directly
            let mut lhs = value_at(end);
            for (j, pr) in spec.transitions(target) {
                lhs = lhs.scaled_add(-spec.gamma * pr, value_at(j));
            }
            (lhs, cm.eval(end - target) + cd.eval(target))
        };

        let (b1, b2) = (rhs1 - row1.c0, rhs2 - row2.c0);
        let det = row1.ca * row2.cb - row1.cb * row2.ca;
        let scale = abs(row1.ca * row2.cb) + abs(row1.cb * row2.ca);
        if !det.is_finite() || abs(det) <= 1e-13 * scale || scale == 0.0 {
            return Err(MdpError::SingularSegment { segment: k });
        }
        seg.alpha = (b1 * row2.cb - row1.cb * b2) / det;
        seg.beta = (row1.ca * b2 - b1 * row2.ca) / det;

        let first = if k == 0 { 0 } else { start + 1 };
        for d in first..=end {
            values[d] = seg.eval(&phi, d);
        }
        segments.push(seg);
        start = end;
    }
    Ok((ValueTable1D::new(values), ClosedFormCoeffs { phi, segments }))
}

/// Exact policy evaluation by Gaussian elimination on `(I - gamma P) V = C`.
pub fn evaluate_policy_linear_system(
    spec: &DistanceMdpSpec,
    policy: &DistancePolicy,
) -> Result<ValueTable1D, MdpError> {
    spec.validate()?;
    if policy.n_max() != spec.n_max {
        return Err(MdpError::InvalidPolicy("policy size does not match n_max"));
    }
    let n = spec.n_max + 1;
    let mut a = DenseMatrix::identity(n);
    let mut b = vec![0.0; n];
    for d in 0..n {
        let act = policy.action(d);
        b[d] = spec.one_slot_cost(d, act)?;
        for (j, pr) in spec.transitions(act) {
            a.add(d, j, -spec.gamma * pr);
        }
    }
    let v = linalg::solve(a, b).ok_or(MdpError::SingularSegment { segment: 0 })?;
    Ok(ValueTable1D::new(v))
}

/// Greedy improvement with ties broken towards the smallest action.
pub fn greedy_policy(spec: &DistanceMdpSpec, values: &[f64]) -> DistancePolicy {
    let n = spec.n_max;
    let mut actions = vec![0; n + 1];
    for d in 1..=n {
        actions[d] = argmin_smallest((0..=spec.action_bound(d)).map(|a| spec.q_value(values, d, a)));
    }
    DistancePolicy { actions }
}

/// Index of the minimum, preferring the earliest entry among near-ties.
pub(crate) fn argmin_smallest(scores: impl Iterator<Item = f64> + Clone) -> usize {
    let best = scores.clone().fold(f64::INFINITY, f64::min);
    let slack = TIE_TOLERANCE * (1.0 + abs(best));
    scores.into_iter().position(|s| s <= best + slack).unwrap_or(0)
}

/// Output of [`modified_policy_iteration`].
#[derive(Debug, Clone, PartialEq)]
pub struct MpiSolution {
    pub policy: DistancePolicy,
    pub values: ValueTable1D,
    pub coeffs: ClosedFormCoeffs,
    pub iterations: usize,
}

/// Policy iteration with closed-form evaluation, starting from `a(d) = 0`.
pub fn modified_policy_iteration(spec: &DistanceMdpSpec) -> Result<MpiSolution, MdpError> {
    modified_policy_iteration_observed(spec, |_, _, _| {})
}

/// [`modified_policy_iteration`] that reports each evaluated policy.
pub fn modified_policy_iteration_observed(
    spec: &DistanceMdpSpec,
    mut observe: impl FnMut(usize, &DistancePolicy, &ValueTable1D),
) -> Result<MpiSolution, MdpError> {
    let cap = 10 * (spec.n_max + 1);
    let mut policy = DistancePolicy::always_migrate(spec.n_max);
    for iteration in 1..=cap {
        let (values, coeffs) = closed_form_value(spec, &policy)?;
        observe(iteration, &policy, &values);
        let next = greedy_policy(spec, values.as_slice());
        if next == policy {
            return Ok(MpiSolution { policy, values, coeffs, iterations: iteration });
        }
        policy = next;
    }
    Err(MdpError::NonConvergence { iterations: cap })
}

/// Output of [`value_iteration_1d`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValueIterationSolution {
    pub policy: DistancePolicy,
    pub values: ValueTable1D,
    pub iterations: usize,
}

const VALUE_ITERATION_CAP: usize = 10_000_000;

/// Bellman fixed-point iteration from `V = 0`, stopped once the sup-norm step
/// drops below `tolerance (1 - gamma) / gamma`.
pub fn value_iteration_1d(spec: &DistanceMdpSpec, tolerance: f64) -> Result<ValueIterationSolution, MdpError> {
    spec.validate()?;
    if !(tolerance > 0.0) {
        return Err(MdpError::InvalidSpec { field: "tolerance", reason: "must be positive" });
    }
    let n = spec.n_max;
    let threshold = tolerance * (1.0 - spec.gamma) / spec.gamma;
    let mut values = vec![0.0; n + 1];
    let mut next = vec![0.0; n + 1];
    for iteration in 1..=VALUE_ITERATION_CAP {
        let mut delta: f64 = 0.0;
        for d in 0..=n {
            let best = (0..=spec.action_bound(d)).map(|a| spec.q_value(&values, d, a)).fold(f64::INFINITY, f64::min);
            delta = delta.max(abs(best - values[d]));
            next[d] = best;
        }
        core::mem::swap(&mut values, &mut next);
        if delta < threshold {
            let policy = greedy_policy(spec, &values);
            return Ok(ValueIterationSolution { policy, values: ValueTable1D::new(values), iterations: iteration });
        }
    }
    Err(MdpError::NonConvergence { iterations: VALUE_ITERATION_CAP })
}

/// Optimal policy by the closed-form policy iteration, or by value iteration
/// when `p = 0` leaves the closed form undefined.
pub fn solve_optimal(spec: &DistanceMdpSpec) -> Result<(DistancePolicy, ValueTable1D), MdpError> {
    if spec.p == 0.0 {
        let sol = value_iteration_1d(spec, 1e-9)?;
        Ok((sol.policy, sol.values))
    } else {
        let sol = modified_policy_iteration(spec)?;
        Ok((sol.policy, sol.values))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n_max: usize, cm: ConstPlusExpCost, cd: ConstPlusExpCost) -> DistanceMdpSpec {
        DistanceMdpSpec { n_max, p0: 0.5, p: 0.25, q: 0.25, gamma: 0.9, migration_cost: cm, transmission_cost: cd }
    }

    #[test]
    fn one_slot_cost_examples() {
        let s = spec(10, ConstPlusExpCost::new(1.5, -0.5, 0.8), ConstPlusExpCost::new(1.0, -1.0, 0.8));
        assert_eq!(s.one_slot_cost(0, 0).unwrap(), 0.0);
        assert!((s.one_slot_cost(3, 3).unwrap() - 0.488).abs() < 1e-12);
        assert!((s.one_slot_cost(3, 0).unwrap() - 1.244).abs() < 1e-12);
        assert_eq!(s.one_slot_cost(2, 3), Err(MdpError::InvalidAction { state: 2, action: 3 }));
    }

    #[test]
    fn phi_constants_symmetric_walk() {
        let s = spec(10, ConstPlusExpCost::zero(), ConstPlusExpCost::new(1.0, -1.0, 0.8));
        let phi = phi_constants(&s).unwrap();
        // gamma q / (1 - gamma (1 - p - q)) = 0.225 / 0.55
        assert!((phi.phi1 - 0.225 / 0.55).abs() < 1e-15);
        assert_eq!(phi.phi1, phi.phi2);
        assert!((phi.m1 - 1.924_950_591).abs() < 1e-8);
        assert!((phi.m2 - 0.519_493_853).abs() < 1e-8);
        assert!((phi.m1 * phi.m2 - 1.0).abs() < 1e-12);
        assert!(!phi.degenerate);
    }

    #[test]
    fn p_zero_is_degenerate() {
        let mut s = spec(5, ConstPlusExpCost::zero(), ConstPlusExpCost::new(1.0, -1.0, 0.8));
        s.p = 0.0;
        assert_eq!(phi_constants(&s), Err(MdpError::DegenerateSpec));
    }

    #[test]
    fn policy_validation() {
        assert!(DistancePolicy::new(vec![0, 1, 2]).is_err());
        assert!(DistancePolicy::new(vec![1, 1, 0]).is_err());
        assert!(DistancePolicy::new(vec![0, 2, 0]).is_err());
        assert!(DistancePolicy::new(vec![0, 1, 1]).is_ok());
        assert_eq!(DistancePolicy::never_migrate(4).migration_states(), [4]);
        assert_eq!(DistancePolicy::always_migrate(3).migration_states(), [1, 2, 3]);
    }

    #[test]
    fn always_migrate_relation() {
        let s = spec(8, ConstPlusExpCost::new(1.5, -0.5, 0.8), ConstPlusExpCost::new(1.0, -1.0, 0.8));
        let (v, _) = closed_form_value(&s, &DistancePolicy::always_migrate(8)).unwrap();
        for d in 1..=8 {
            let want = s.migration_cost.eval(d) + v.get(0);
            assert!((v.get(d) - want).abs() < 1e-12 * (1.0 + want));
        }
    }

    #[test]
    fn zero_transmission_cost_never_migrate() {
        let s = spec(6, ConstPlusExpCost::new(1.5, -0.5, 0.8), ConstPlusExpCost::zero());
        let (v, _) = closed_form_value(&s, &DistancePolicy::never_migrate(6)).unwrap();
        let oracle = evaluate_policy_linear_system(&s, &DistancePolicy::never_migrate(6)).unwrap();
        assert!(v.max_abs_diff(&oracle) < 1e-10);
        // migration cost at N still accrues, so only the value at 0 is forced
        // to vanish when the walk never reaches N...
        assert!(v.get(0) > 0.0);
        // ...but with migration also free everything is zero.
        let mut s0 = s;
        s0.migration_cost = ConstPlusExpCost::zero();
        let (v0, _) = closed_form_value(&s0, &DistancePolicy::never_migrate(6)).unwrap();
        assert!(v0.as_slice().iter().all(|&x| x.abs() < 1e-12));
    }

    #[test]
    fn linear_system_zero_costs() {
        let mut s = spec(5, ConstPlusExpCost::zero(), ConstPlusExpCost::zero());
        s.gamma = 0.5;
        let v = evaluate_policy_linear_system(&s, &DistancePolicy::never_migrate(5)).unwrap();
        assert!(v.as_slice().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn linear_system_origin_row() {
        let s = spec(10, ConstPlusExpCost::new(1.5, -0.5, 0.8), ConstPlusExpCost::new(1.0, -1.0, 0.8));
        let v = evaluate_policy_linear_system(&s, &DistancePolicy::never_migrate(10)).unwrap();
        let rhs = s.gamma * s.p0 * v.get(1) + s.gamma * (1.0 - s.p0) * v.get(0);
        assert!((v.get(0) - rhs).abs() < 1e-12);
    }

    #[test]
    fn value_iteration_zero_costs_converges_immediately() {
        let mut s = spec(5, ConstPlusExpCost::zero(), ConstPlusExpCost::zero());
        s.gamma = 0.5;
        let sol = value_iteration_1d(&s, 1e-9).unwrap();
        assert_eq!(sol.iterations, 1);
        assert!(sol.values.as_slice().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn nonconvergence_cap_is_reported_not_hit() {
        let s = spec(10, ConstPlusExpCost::new(1.5, -0.5, 0.8), ConstPlusExpCost::new(1.0, -1.0, 0.8));
        let sol = modified_policy_iteration(&s).unwrap();
        assert!(sol.iterations <= 10 * 11);
        assert!(sol.policy.action(10) < 10);
    }

    #[test]
    fn resonant_theta_is_perturbed() {
        // choose theta equal to m2 of the symmetric walk
        let base = spec(10, ConstPlusExpCost::new(1.5, -0.5, 0.8), ConstPlusExpCost::new(1.0, -1.0, 0.8));
        let m2 = phi_constants(&base).unwrap().m2;
        let mut s = base;
        s.transmission_cost = ConstPlusExpCost::new(1.0, -1.0, m2);
        let phi = phi_constants(&s).unwrap();
        assert!(phi.degenerate);
        assert!((phi.theta - m2).abs() <= 1.0001 * THETA_PERTURBATION);
        let policy = DistancePolicy::never_migrate(10);
        let (v, _) = closed_form_value(&s, &policy).unwrap();
        let oracle = evaluate_policy_linear_system(&s, &policy).unwrap();
        for d in 0..=10 {
            assert!((v.get(d) - oracle.get(d)).abs() < 1e-5 * (1.0 + oracle.get(d)));
        }
    }
}
