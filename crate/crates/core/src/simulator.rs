//! Monte Carlo random walks and the trace-driven migration pipeline.
//!
//! The trace pipeline works on an in-memory [`SlottedTrace`]: one cell (in
//! world axial coordinates) per entity per slot. Every `update_interval`
//! slots a controller step re-estimates the per-neighbor move probability
//! from the recent window, rebuilds load-dependent costs and re-solves each
//! policy; in between, every active entity observes its offset, applies the
//! current action and pays the one-slot cost before moving.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::baselines::{hex_baseline, BaselineKind};
use crate::cost_model::ConstPlusExpCost;
use crate::distance_mdp::MdpError;
use crate::hex::{Axial, HexOffset, DIRECTIONS};
use crate::hex_mdp::{approximate_policy, shortest_path_target, HexMdpSpec, HexPolicy};
use crate::math::{cos, sqrt};

/// Mean Earth radius used by the local tangent-plane projection.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;
/// Slots an entity keeps its last cell after its fixes stop.
pub const DEFAULT_GAP_CARRY_SLOTS: usize = 5;
/// Exponential base of the load-dependent costs.
pub const DEFAULT_COST_BASE: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("no occupied cell-slots in the estimation window")]
    InsufficientData,
    #[error("invalid load snapshot: {0}")]
    InvalidLoad(&'static str),
    #[error("load diverges: R * m_max = {capacity} does not exceed m_cur = {m_cur}")]
    DivergentLoad { capacity: f64, m_cur: usize },
    #[error("baseline cost must be positive")]
    ZeroBaseline,
    #[error("invalid simulation parameter `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: &'static str },
    #[error(transparent)]
    Mdp(#[from] MdpError),
}

// ---------------------------------------------------------------------------
// Monte Carlo on the offset MDP

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub episodes: usize,
}

/// Uniform hexagon step: each neighbor with probability `r`, else stay.
fn step(rng: &mut ChaCha8Rng, r: f64) -> Option<Axial> {
    let u: f64 = rng.random();
    if u < 6.0 * r {
        let k = ((u / r) as usize).min(5);
        Some(DIRECTIONS[k])
    } else {
        None
    }
}

/// Smallest horizon with `gamma^T * c_max / (1 - gamma) < tail_tolerance`,
/// where `c_max` bounds the one-slot cost.
pub fn horizon_for_tolerance(spec: &HexMdpSpec, tail_tolerance: f64) -> usize {
    let c_max = spec.migration_cost.eval(spec.n_max) + spec.transmission_cost.eval(spec.n_max);
    let mut tail = c_max / (1.0 - spec.gamma);
    let mut t = 0;
    while tail >= tail_tolerance && t < 1_000_000 {
        tail *= spec.gamma;
        t += 1;
    }
    t
}

/// Discounted cost of `policy` from `start`, averaged over `episodes`
/// simulated walks of length `horizon`.
pub fn simulate_random_walk(
    spec: &HexMdpSpec,
    policy: &HexPolicy,
    start: HexOffset,
    horizon: usize,
    episodes: usize,
    seed: u64,
) -> McEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.n_max as u32;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..episodes {
        let mut state = start;
        let mut discount = 1.0;
        let mut total = 0.0;
        for _ in 0..horizon {
            let action = policy.action(state);
            total += discount * spec.one_slot_cost(state, action);
            discount *= spec.gamma;
            state = match step(&mut rng, spec.move_prob) {
                Some(dir) => {
                    let next = HexOffset::from_axial(action.to_axial() + dir);
                    if next.ring > n {
                        action
                    } else {
                        next
                    }
                }
                None => action,
            };
        }
        sum += total;
        sum_sq += total * total;
    }
    let k = episodes.max(1) as f64;
    let mean = sum / k;
    let var = if episodes > 1 { (sum_sq - k * mean * mean).max(0.0) / (k - 1.0) } else { 0.0 };
    McEstimate { mean, std_error: sqrt(var / k), episodes }
}

// ---------------------------------------------------------------------------
// Traces

/// One GPS fix.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub entity: String,
    /// Seconds since the epoch.
    pub timestamp: i64,
    pub lat: f64,
    pub lon: f64,
}

/// Cell of one entity in one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotCell {
    /// No fix, and the last one is too old to carry.
    Absent,
    /// The last fix inside the slot fell in this cell.
    Observed(Axial),
    /// No fix in the slot; the previous cell is carried across a short gap.
    Carried(Axial),
}

impl SlotCell {
    pub fn cell(self) -> Option<Axial> {
        match self {
            SlotCell::Absent => None,
            SlotCell::Observed(c) | SlotCell::Carried(c) => Some(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntityTrack {
    pub id: String,
    pub slots: Vec<SlotCell>,
}

/// Per-slot cell sequences for every entity, sorted by entity id.
#[derive(Debug, Clone, PartialEq)]
pub struct SlottedTrace {
    pub slot_len_s: i64,
    pub start_time: i64,
    pub n_slots: usize,
    pub entities: Vec<EntityTrack>,
}

impl SlottedTrace {
    /// Entities with a cell (observed or carried) in slot `t`.
    pub fn active_count(&self, t: usize) -> usize {
        self.entities.iter().filter(|e| e.slots[t].cell().is_some()).count()
    }

    /// Entities with an actual fix in slots `(t - window, t]`.
    pub fn recently_observed(&self, t: usize, window: usize) -> usize {
        let lo = (t + 1).saturating_sub(window.max(1));
        self.entities
            .iter()
            .filter(|e| e.slots[lo..=t].iter().any(|c| matches!(c, SlotCell::Observed(_))))
            .count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TessellationConfig {
    /// Center-to-center distance between neighboring cells, in meters.
    pub cell_separation_m: f64,
    pub slot_len_s: i64,
    /// Anchor of the planar projection; the fix centroid when `None`.
    pub origin: Option<(f64, f64)>,
    pub gap_carry_slots: usize,
}

impl TessellationConfig {
    pub fn new(cell_separation_m: f64, slot_len_s: i64) -> Self {
        Self { cell_separation_m, slot_len_s, origin: None, gap_carry_slots: DEFAULT_GAP_CARRY_SLOTS }
    }
}

/// Equirectangular projection around `origin`, in meters.
pub fn project(origin: (f64, f64), lat: f64, lon: f64) -> (f64, f64) {
    let rad = core::f64::consts::PI / 180.0;
    let x = EARTH_RADIUS_M * (lon - origin.1) * rad * cos(origin.0 * rad);
    let y = EARTH_RADIUS_M * (lat - origin.0) * rad;
    (x, y)
}

/// Centroid of the fixes, `(lat, lon)`.
pub fn centroid(records: &[TraceRecord]) -> Option<(f64, f64)> {
    if records.is_empty() {
        return None;
    }
    let n = records.len() as f64;
    let lat = records.iter().map(|r| r.lat).sum::<f64>() / n;
    let lon = records.iter().map(|r| r.lon).sum::<f64>() / n;
    Some((lat, lon))
}

/// Cell of the basestation nearest to a fix.
pub fn cell_of(origin: (f64, f64), cell_separation_m: f64, lat: f64, lon: f64) -> Axial {
    let (x, y) = project(origin, lat, lon);
    Axial::nearest_to_plane(x / cell_separation_m, y / cell_separation_m)
}

/// Assigns fixes to cells and resamples them into slots of `slot_len_s`
/// seconds, keeping the last fix per slot.
pub fn tessellate(records: &[TraceRecord], cfg: &TessellationConfig) -> Result<SlottedTrace, SimError> {
    if !(cfg.cell_separation_m > 0.0) {
        return Err(SimError::InvalidConfig { field: "cell_separation_m", reason: "must be positive" });
    }
    if cfg.slot_len_s <= 0 {
        return Err(SimError::InvalidConfig { field: "T", reason: "must be positive" });
    }
    let Some(origin) = cfg.origin.or_else(|| centroid(records)) else {
        return Ok(SlottedTrace { slot_len_s: cfg.slot_len_s, start_time: 0, n_slots: 0, entities: Vec::new() });
    };
    let start_time = records.iter().map(|r| r.timestamp).min().unwrap_or(0);
    let end_time = records.iter().map(|r| r.timestamp).max().unwrap_or(0);
    let n_slots = ((end_time - start_time) / cfg.slot_len_s) as usize + 1;

    let mut grouped: BTreeMap<&str, Vec<&TraceRecord>> = BTreeMap::new();
    for r in records {
        grouped.entry(r.entity.as_str()).or_default().push(r);
    }
    let entities = grouped
        .into_iter()
        .map(|(id, mut fixes)| {
            fixes.sort_by_key(|r| r.timestamp);
            let mut observed: Vec<Option<Axial>> = vec![None; n_slots];
            for r in fixes {
                let slot = ((r.timestamp - start_time) / cfg.slot_len_s) as usize;
                observed[slot] = Some(cell_of(origin, cfg.cell_separation_m, r.lat, r.lon));
            }
            let mut slots = Vec::with_capacity(n_slots);
            let mut last: Option<(Axial, usize)> = None;
            for (t, obs) in observed.into_iter().enumerate() {
                let cell = match obs {
                    Some(c) => {
                        last = Some((c, t));
                        SlotCell::Observed(c)
                    }
                    None => match last {
                        Some((c, seen)) if t - seen <= cfg.gap_carry_slots => SlotCell::Carried(c),
                        _ => SlotCell::Absent,
                    },
                };
                slots.push(cell);
            }
            EntityTrack { id: String::from(id), slots }
        })
        .collect();
    Ok(SlottedTrace { slot_len_s: cfg.slot_len_s, start_time, n_slots, entities })
}

/// Synthetic population of uniform hexagon random walks confined to the cells
/// within `radius` hops of the world origin.
///
/// Each walker starts in a uniformly chosen cell. A move that would leave the
/// region goes in the opposite direction instead, which is always inside, so
/// every cell keeps departure probability `6r`.
pub fn synthetic_population(entities: usize, slots: usize, r: f64, radius: u32, seed: u64) -> SlottedTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = crate::hex::state_count(radius);
    let width = id_width(entities);
    let tracks = (0..entities)
        .map(|k| {
            let mut pos = HexOffset::from_linear_index(rng.random_range(0..cells)).to_axial();
            let mut out = Vec::with_capacity(slots);
            for _ in 0..slots {
                out.push(SlotCell::Observed(pos));
                if let Some(d) = step(&mut rng, r) {
                    let next = pos + d;
                    pos = if next.norm() > radius { pos - d } else { next };
                }
            }
            EntityTrack { id: alloc::format!("e{:0width$}", k, width = width), slots: out }
        })
        .collect();
    SlottedTrace { slot_len_s: 60, start_time: 0, n_slots: slots, entities: tracks }
}

/// Decimal digits of the largest index below `count`.
fn id_width(count: usize) -> usize {
    let mut n = count.max(1) - 1;
    let mut w = 1;
    while n >= 10 {
        n /= 10;
        w += 1;
    }
    w
}

/// Per-neighbor move probability from the slots `[at_slot - window, at_slot]`.
///
/// Each cell's departure rate is departures over occupant-slots; the cells'
/// rates are averaged without weights and divided by six.
pub fn estimate_r(slotted: &SlottedTrace, window_slots: usize, at_slot: usize) -> Result<f64, SimError> {
    let last = at_slot.min(slotted.n_slots.saturating_sub(1));
    let first = last.saturating_sub(window_slots);
    let mut per_cell: BTreeMap<Axial, (u64, u64)> = BTreeMap::new();
    for e in &slotted.entities {
        for t in first..last {
            if let (Some(a), Some(b)) = (e.slots[t].cell(), e.slots[t + 1].cell()) {
                let entry = per_cell.entry(a).or_insert((0, 0));
                entry.0 += 1;
                if a != b {
                    entry.1 += 1;
                }
            }
        }
    }
    if per_cell.is_empty() {
        return Err(SimError::InsufficientData);
    }
    let mean_f = per_cell.values().map(|&(occ, dep)| dep as f64 / occ as f64).sum::<f64>() / per_cell.len() as f64;
    Ok((mean_f / 6.0).clamp(0.0, 1.0 / 6.0))
}

// ---------------------------------------------------------------------------
// Load-dependent costs

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadSnapshot {
    pub m_cur: usize,
    pub m_max: usize,
    /// Normalized transmission resource `R_t`.
    pub r_t: f64,
    /// Normalized processing resource `R_p`.
    pub r_p: f64,
}

/// `1 / (1 - m_cur / (R m_max))`.
pub fn load_factor(m_cur: usize, m_max: usize, resource: f64) -> Result<f64, SimError> {
    let capacity = resource * m_max as f64;
    if !(capacity > m_cur as f64) {
        return Err(SimError::DivergentLoad { capacity, m_cur });
    }
    Ok(1.0 / (1.0 - m_cur as f64 / capacity))
}

/// `c_m = (G_p + G_t, -G_t, base)` and `c_d = (G_t, -G_t, base)` with
/// `base = 0.8`.
pub fn load_costs(load: &LoadSnapshot) -> Result<(ConstPlusExpCost, ConstPlusExpCost), SimError> {
    load_costs_with_base(load, DEFAULT_COST_BASE)
}

pub fn load_costs_with_base(
    load: &LoadSnapshot,
    base: f64,
) -> Result<(ConstPlusExpCost, ConstPlusExpCost), SimError> {
    if load.m_cur == 0 {
        return Err(SimError::InvalidLoad("m_cur must be positive"));
    }
    if load.m_cur > load.m_max {
        return Err(SimError::InvalidLoad("m_cur exceeds m_max"));
    }
    if !(0.0..=1.0).contains(&base) {
        return Err(SimError::InvalidLoad("cost base must lie in [0, 1]"));
    }
    let gt = load_factor(load.m_cur, load.m_max, load.r_t)?;
    let gp = load_factor(load.m_cur, load.m_max, load.r_p)?;
    Ok((ConstPlusExpCost::new(gp + gt, -gt, base), ConstPlusExpCost::new(gt, -gt, base)))
}

/// `(C0 - C) / C0`.
pub fn cost_reduction(baseline_cost: f64, proposed_cost: f64) -> Result<f64, SimError> {
    if !(baseline_cost > 0.0) {
        return Err(SimError::ZeroBaseline);
    }
    Ok((baseline_cost - proposed_cost) / baseline_cost)
}

// ---------------------------------------------------------------------------
// Trace-driven simulation

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolicyKind {
    /// Distance-MDP policy mapped onto the hexagon.
    Proposed,
    Baseline(BaselineKind),
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [
        PolicyKind::Proposed,
        PolicyKind::Baseline(BaselineKind::NeverMigrate),
        PolicyKind::Baseline(BaselineKind::AlwaysMigrate),
        PolicyKind::Baseline(BaselineKind::Myopic),
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Proposed => "proposed",
            PolicyKind::Baseline(b) => b.name(),
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceSimConfig {
    /// `T_u` in slots.
    pub update_interval_slots: usize,
    /// `T_w` in slots.
    pub window_slots: usize,
    pub n_max: usize,
    pub gamma: f64,
    pub r_t: f64,
    pub r_p: f64,
    pub cost_base: f64,
    pub policies: Vec<PolicyKind>,
}

impl TraceSimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |field, reason| Err(SimError::InvalidConfig { field, reason });
        if self.update_interval_slots == 0 {
            return bad("T_u", "must be at least one slot");
        }
        if self.window_slots == 0 {
            return bad("T_w", "must be at least one slot");
        }
        if self.n_max < 2 {
            return bad("N", "must be at least 2");
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("gamma", "must lie in (0, 1)");
        }
        if !(self.r_t > 0.0) {
            return bad("R_t", "must be positive");
        }
        if !(self.r_p > 0.0) {
            return bad("R_p", "must be positive");
        }
        if self.policies.is_empty() {
            return bad("policies", "at least one policy is required");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlotSummary {
    pub slot: usize,
    pub active: usize,
    /// Move probability in effect during the slot.
    pub r: f64,
    /// Load count used for the costs in effect.
    pub m_cur: usize,
    /// Average one-slot cost per active user, one entry per policy.
    pub avg_cost: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyTotal {
    pub kind: PolicyKind,
    pub total_cost: f64,
    pub user_slots: usize,
    /// `total_cost / user_slots`.
    pub mean_cost: f64,
    /// Standard error of the per-entity mean costs.
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub baseline: PolicyKind,
    /// `(C0 - C) / C0` of the proposed policy against `baseline`.
    pub reduction: f64,
    /// Mean of per-entity `baseline - proposed` cost differences.
    pub mean_difference: f64,
    pub difference_std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub policies: Vec<PolicyKind>,
    pub slots: Vec<SlotSummary>,
    pub totals: Vec<PolicyTotal>,
    pub reductions: Vec<Reduction>,
    /// `(slot, r)` at every controller step.
    pub r_series: Vec<(usize, f64)>,
    /// Largest user-service distance right after an action.
    pub max_post_action_distance: u32,
    /// Entities whose offset exceeded `N` before migration.
    pub overshoots: usize,
}

impl SimReport {
    pub fn total(&self, kind: PolicyKind) -> Option<&PolicyTotal> {
        self.totals.iter().find(|t| t.kind == kind)
    }
}

/// Post-action offset for observed offset `e`, including offsets beyond ring
/// `N`, which reuse the boundary action's target ring.
fn act(policy: &HexPolicy, n_max: usize, e: Axial) -> Axial {
    let off = HexOffset::from_axial(e);
    if off.ring as usize <= n_max {
        return policy.action(off).to_axial();
    }
    let boundary = shortest_path_target(off, n_max as u32);
    let ring = policy.action(boundary).ring;
    shortest_path_target(off, ring).to_axial()
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, sqrt(var / n))
}

/// Runs every configured policy on the same slotted trace.
pub fn run_trace_simulation(slotted: &SlottedTrace, config: &TraceSimConfig) -> Result<SimReport, SimError> {
    config.validate()?;
    let n_pol = config.policies.len();
    let n_ent = slotted.entities.len();
    let m_max = (0..slotted.n_slots)
        .map(|t| slotted.recently_observed(t, config.update_interval_slots))
        .max()
        .unwrap_or(0)
        .max(1);

    let mut services: Vec<Vec<Option<Axial>>> = vec![vec![None; n_ent]; n_pol];
    let mut entity_cost = vec![vec![0.0; n_ent]; n_pol];
    let mut entity_slots = vec![0usize; n_ent];
    let mut policies: Vec<HexPolicy> = Vec::new();
    let mut spec = HexMdpSpec {
        n_max: config.n_max,
        move_prob: 0.0,
        gamma: config.gamma,
        migration_cost: ConstPlusExpCost::zero(),
        transmission_cost: ConstPlusExpCost::zero(),
    };
    let mut r_current = 0.0;
    let mut m_cur = 0;
    let mut report = SimReport {
        policies: config.policies.clone(),
        slots: Vec::with_capacity(slotted.n_slots),
        totals: Vec::new(),
        reductions: Vec::new(),
        r_series: Vec::new(),
        max_post_action_distance: 0,
        overshoots: 0,
    };

    for t in 0..slotted.n_slots {
        if t % config.update_interval_slots == 0 {
            if let Ok(r) = estimate_r(slotted, config.window_slots, t) {
                r_current = r;
            }
            m_cur = slotted.recently_observed(t, config.update_interval_slots).max(1);
            let load = LoadSnapshot { m_cur, m_max, r_t: config.r_t, r_p: config.r_p };
            let (cm, cd) = load_costs_with_base(&load, config.cost_base)?;
            spec.move_prob = r_current;
            spec.migration_cost = cm;
            spec.transmission_cost = cd;
            policies = config
                .policies
                .iter()
                .map(|&k| match k {
                    PolicyKind::Proposed => approximate_policy(&spec).map(|s| s.policy),
                    PolicyKind::Baseline(b) => Ok(hex_baseline(&spec, b)),
                })
                .collect::<Result<_, _>>()?;
            report.r_series.push((t, r_current));
        }

        let mut slot_cost = vec![0.0; n_pol];
        let mut active = 0;
        for (ei, track) in slotted.entities.iter().enumerate() {
            let Some(user) = track.slots[t].cell() else {
                for s in services.iter_mut() {
                    s[ei] = None;
                }
                continue;
            };
            active += 1;
            entity_slots[ei] += 1;
            for (pi, policy) in policies.iter().enumerate() {
                let service = *services[pi][ei].get_or_insert(user);
                let e = user - service;
                if e.norm() as usize > config.n_max {
                    report.overshoots += 1;
                }
                let after = act(policy, config.n_max, e);
                let cost = spec.migration_cost.eval(e.distance(after) as usize)
                    + spec.transmission_cost.eval(after.norm() as usize);
                report.max_post_action_distance = report.max_post_action_distance.max(after.norm());
                services[pi][ei] = Some(user - after);
                slot_cost[pi] += cost;
                entity_cost[pi][ei] += cost;
            }
        }
        let avg_cost = slot_cost.iter().map(|c| if active > 0 { c / active as f64 } else { 0.0 }).collect();
        report.slots.push(SlotSummary { slot: t, active, r: r_current, m_cur, avg_cost });
    }

    let user_slots: usize = entity_slots.iter().sum();
    let per_entity_mean = |pi: usize| -> Vec<f64> {
        (0..n_ent).filter(|&e| entity_slots[e] > 0).map(|e| entity_cost[pi][e] / entity_slots[e] as f64).collect()
    };
    for (pi, &kind) in config.policies.iter().enumerate() {
        let total_cost: f64 = entity_cost[pi].iter().sum();
        let (_, std_error) = mean_and_se(&per_entity_mean(pi));
        let mean_cost = if user_slots > 0 { total_cost / user_slots as f64 } else { 0.0 };
        report.totals.push(PolicyTotal { kind, total_cost, user_slots, mean_cost, std_error });
    }
    if let Some(pp) = config.policies.iter().position(|&k| k == PolicyKind::Proposed) {
        let proposed = per_entity_mean(pp);
        for (pi, &kind) in config.policies.iter().enumerate() {
            if pi == pp {
                continue;
            }
            let diffs: Vec<f64> = per_entity_mean(pi).iter().zip(&proposed).map(|(b, p)| b - p).collect();
            let (mean_difference, difference_std_error) = mean_and_se(&diffs);
            let c0 = report.totals[pi].mean_cost;
            let c = report.totals[pp].mean_cost;
            let reduction = cost_reduction(c0, c).unwrap_or(0.0);
            report.reductions.push(Reduction { baseline: kind, reduction, mean_difference, difference_std_error });
        }
    }
    Ok(report)
}
