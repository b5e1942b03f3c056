//! One function per CLI subcommand. Each validates its config section,
//! runs the solver, writes its outputs and a `manifest.json`, and returns the
//! manifest path.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use edgemig_core::baselines::{hex_baseline, BaselineKind};
use edgemig_core::cost_model::{fit_exponential, RootChoice, TabulatedCost};
use edgemig_core::distance_mdp::{modified_policy_iteration, value_iteration_1d};
use edgemig_core::hex_mdp::{
    approximate_policy, error_bound, evaluate_policy_2d, solve_exact, ExactMethod, HexMdpSpec, ValueTable2D,
};
use edgemig_core::simulator::{
    run_trace_simulation, synthetic_population, tessellate, SimReport, SlottedTrace, TessellationConfig,
};
use log::info;
use serde::Serialize;
use serde_json::json;

use crate::config::{
    random_move_prob, ConfigError, ExactSolver, RunConfig, SimulationMode, SolveMethod, SweepParameter, TraceFormatName,
    TraceInput,
};
use crate::output::{comparison_rows, distance_rows, hex_rows, Manifest, OutputDir, OutputFormat};
use crate::traces::{ingest, IngestOptions, TraceError, TraceFormat};
use crate::AppError;

/// Settings shared by every command.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub out: PathBuf,
    pub format: OutputFormat,
    pub seed: u64,
}

impl RunContext {
    /// Command-line values win over the config file.
    pub fn resolve(cfg: &RunConfig, out: Option<PathBuf>, seed: Option<u64>, format: OutputFormat) -> Self {
        Self {
            out: out.or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out")),
            format,
            seed: seed.unwrap_or(cfg.seed),
        }
    }
}

#[derive(Serialize)]
struct PolicyRow {
    d: usize,
    action: usize,
}

pub fn solve_1d(cfg: &RunConfig, ctx: &RunContext) -> Result<PathBuf, AppError> {
    let section = RunConfig::section(&cfg.solve_1d, "solve_1d")?;
    let spec = section.to_spec()?;
    let start = Instant::now();
    let (policy, values, iterations, solver) = if spec.p == 0.0 {
        let sol = value_iteration_1d(&spec, 1e-12)?;
        (sol.policy, sol.values, sol.iterations, "value-iteration")
    } else {
        let sol = modified_policy_iteration(&spec)?;
        (sol.policy, sol.values, sol.iterations, "closed-form-policy-iteration")
    };
    let elapsed = start.elapsed().as_secs_f64();
    info!("solve-1d: {iterations} iterations in {elapsed:.6} s");

    let mut out = OutputDir::create(&ctx.out, ctx.format)?;
    let rows: Vec<PolicyRow> = (0..=spec.n_max).map(|d| PolicyRow { d, action: policy.action(d) }).collect();
    out.table("policy", &rows)?;
    out.table("values", &distance_rows(&policy, &values))?;
    let mut manifest = Manifest::new("solve-1d", ctx.seed, section);
    manifest.results = json!({
        "solver": solver,
        "iterations": iterations,
        "p0": spec.p0,
        "p": spec.p,
        "q": spec.q,
        "migration_states": policy.migration_states(),
    });
    manifest.timing = json!({ "solver_s": elapsed });
    manifest.finish(&mut out)
}

/// Mean over states and the largest per-state excess of `v` over `best`.
fn gap(v: &ValueTable2D, best: &ValueTable2D) -> (f64, f64) {
    let max = v.as_slice().iter().zip(best.as_slice()).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
    (v.mean() - best.mean(), max)
}

pub fn solve_2d(cfg: &RunConfig, ctx: &RunContext, method: Option<SolveMethod>) -> Result<PathBuf, AppError> {
    let section = RunConfig::section(&cfg.solve_2d, "solve_2d")?;
    let spec = section.to_spec(ctx.seed)?;
    let method = method.unwrap_or(section.method);
    let mut out = OutputDir::create(&ctx.out, ctx.format)?;
    let mut results = json!({ "r": spec.move_prob, "method": method, "error_bound": error_bound(&spec) });
    let mut timing = serde_json::Map::new();

    let exact = if method != SolveMethod::Approx {
        let solver = match section.exact_solver {
            ExactSolver::PolicyIteration => ExactMethod::PolicyIteration,
            ExactSolver::ValueIteration => ExactMethod::ValueIteration,
        };
        let start = Instant::now();
        let sol = solve_exact(&spec, solver, section.tolerance)?;
        let t = start.elapsed().as_secs_f64();
        info!("solve-2d: exact solver {} iterations, wall time {t:.6} s", sol.iterations);
        timing.insert("exact_s".into(), t.into());
        results["exact_iterations"] = sol.iterations.into();
        results["optimal_mean"] = sol.values.mean().into();
        out.table("exact_policy", &hex_rows(&sol.policy, &sol.values))?;
        Some(sol)
    } else {
        None
    };

    if method != SolveMethod::Exact {
        let start = Instant::now();
        let approx = approximate_policy(&spec)?;
        let t = start.elapsed().as_secs_f64();
        info!("solve-2d: approximation wall time {t:.6} s");
        timing.insert("approx_s".into(), t.into());
        let v_dist = evaluate_policy_2d(&spec, &approx.policy)?;
        results["approx_mean"] = v_dist.mean().into();
        out.table("approx_policy", &hex_rows(&approx.policy, &v_dist))?;

        if let Some(exact) = &exact {
            let (mean_gap, max_gap) = gap(&v_dist, &exact.values);
            let bound = error_bound(&spec);
            info!("solve-2d: observed max gap {max_gap:.3e}, bound {bound:.3e}");
            results["mean_gap"] = mean_gap.into();
            results["max_gap"] = max_gap.into();
            results["gap_within_bound"] = (max_gap <= bound + 1e-8).into();
            if let (Some(e), Some(a)) = (timing.get("exact_s"), timing.get("approx_s")) {
                let ratio = e.as_f64().unwrap_or(0.0) / a.as_f64().unwrap_or(0.0).max(1e-12);
                timing.insert("speedup".into(), ratio.into());
            }
            let mut rows = comparison_rows("optimal", &exact.values);
            rows.extend(comparison_rows("proposed", &v_dist));
            for kind in BaselineKind::ALL {
                let v = evaluate_policy_2d(&spec, &hex_baseline(&spec, kind))?;
                rows.extend(comparison_rows(kind.name(), &v));
            }
            out.table("comparison", &rows)?;
        }
    }

    let mut manifest = Manifest::new("solve-2d", ctx.seed, section);
    manifest.results = results;
    manifest.timing = timing.into();
    manifest.finish(&mut out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub neg_beta_l: f64,
    pub policy: String,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Intersection {
    pub gamma: f64,
    pub neg_beta_l: f64,
    /// Sweep values on either side of the sign change.
    pub between: [f64; 2],
}

fn sweep_point(spec: &HexMdpSpec) -> Result<Vec<(String, f64)>, AppError> {
    let exact = solve_exact(spec, ExactMethod::PolicyIteration, 1e-10)?;
    let approx = approximate_policy(spec)?;
    let mut costs = vec![
        ("optimal".to_string(), exact.values.mean()),
        ("proposed".to_string(), evaluate_policy_2d(spec, &approx.policy)?.mean()),
    ];
    for kind in BaselineKind::ALL {
        costs.push((kind.name().to_string(), evaluate_policy_2d(spec, &hex_baseline(spec, kind))?.mean()));
    }
    Ok(costs)
}

/// Points where the never- and always-migrate curves cross, located by
/// linear interpolation between neighboring sweep values.
fn intersections(rows: &[SweepRow], by_gamma: bool) -> Vec<Intersection> {
    let cost = |x: &SweepRow, name: &str| -> Option<f64> {
        rows.iter().find(|r| r.gamma == x.gamma && r.neg_beta_l == x.neg_beta_l && r.policy == name).map(|r| r.cost)
    };
    let points: Vec<&SweepRow> = rows.iter().filter(|r| r.policy == "optimal").collect();
    let mut out = Vec::new();
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !by_gamma && a.gamma != b.gamma {
            continue;
        }
        let (Some(na), Some(aa), Some(nb), Some(ab)) = (cost(a, "never"), cost(a, "always"), cost(b, "never"), cost(b, "always"))
        else {
            continue;
        };
        let (da, db) = (na - aa, nb - ab);
        if da == 0.0 || da.signum() != db.signum() {
            let (xa, xb) = if by_gamma { (a.gamma, b.gamma) } else { (a.neg_beta_l, b.neg_beta_l) };
            let frac = if da == db { 0.0 } else { da / (da - db) };
            let x = xa + frac * (xb - xa);
            let (gamma, neg_beta_l) = if by_gamma { (x, a.neg_beta_l) } else { (a.gamma, x) };
            out.push(Intersection { gamma, neg_beta_l, between: [xa, xb] });
        }
    }
    out
}

pub fn sweep(cfg: &RunConfig, ctx: &RunContext) -> Result<PathBuf, AppError> {
    let section = RunConfig::section(&cfg.sweep, "sweep")?;
    section.validate()?;
    let r = section.r.unwrap_or_else(|| random_move_prob(ctx.seed));
    let start = Instant::now();
    let mut rows = Vec::new();
    for (gamma, x) in section.grid() {
        for (policy, cost) in sweep_point(&section.spec(gamma, x, r))? {
            rows.push(SweepRow { gamma, neg_beta_l: x, policy, cost });
        }
    }
    let elapsed = start.elapsed().as_secs_f64();

    let mut out = OutputDir::create(&ctx.out, ctx.format)?;
    let by_gamma = section.parameter == SweepParameter::Gamma;
    if by_gamma {
        out.table("sweep_gamma", &rows)?;
    } else {
        for &gamma in &section.gammas {
            let part: Vec<&SweepRow> = rows.iter().filter(|row| row.gamma == gamma).collect();
            out.table(&format!("sweep_gamma_{gamma}"), &part)?;
        }
    }
    let crossings = intersections(&rows, by_gamma);
    for c in &crossings {
        info!("sweep: never/always intersection near gamma={} -beta_l={}", c.gamma, c.neg_beta_l);
    }
    let mut manifest = Manifest::new("sweep", ctx.seed, section);
    manifest.results = json!({ "r": r, "points": rows.len() / 5, "never_always_intersections": crossings });
    manifest.timing = json!({ "solver_s": elapsed });
    manifest.finish(&mut out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRow {
    pub candidate: &'static str,
    pub selected: bool,
    pub theta_pow_w: f64,
    pub const_term: f64,
    pub lin_term: f64,
    pub base: f64,
    pub sse: f64,
    pub guarded: bool,
    pub residual_0: f64,
    pub residual_w: f64,
    pub residual_2w: f64,
}

fn read_value_column(path: &Path) -> Result<Vec<f64>, AppError> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let bad = |reason: String| ConfigError::Invalid { field: "fit.input".into(), reason };
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col = headers.iter().position(|h| h == "value").ok_or_else(|| bad("no `value` column".into()))?;
    let mut values = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let v = rec.get(col).unwrap_or_default();
        values.push(v.parse().map_err(|_| bad(format!("line {line}: bad value `{v}`")))?);
    }
    Ok(values)
}

pub fn fit(cfg: &RunConfig, ctx: &RunContext) -> Result<PathBuf, AppError> {
    let section = RunConfig::section(&cfg.fit, "fit")?;
    let values = match (&section.input, &section.values) {
        (Some(path), None) => read_value_column(path)?,
        (None, Some(v)) => v.clone(),
        _ => {
            return Err(ConfigError::Invalid { field: "fit.input".into(), reason: "give exactly one of input, values".into() }
                .into())
        }
    };
    let table = TabulatedCost::new(values)?;
    let w = table.width();
    let result = fit_exponential(&table)?;
    let f = table.values();
    let rows: Vec<FitRow> = result
        .candidates
        .iter()
        .map(|c| FitRow {
            candidate: match c.root {
                RootChoice::Plus => "plus",
                RootChoice::Minus => "minus",
            },
            selected: c.root == result.root_used,
            theta_pow_w: c.theta_pow_w,
            const_term: c.params.const_term,
            lin_term: c.params.lin_term,
            base: c.params.base,
            sse: c.sse,
            guarded: c.guarded,
            residual_0: f[0] - c.params.eval_exponential(0),
            residual_w: f[w] - c.params.eval_exponential(w),
            residual_2w: f[2 * w] - c.params.eval_exponential(2 * w),
        })
        .collect();
    info!(
        "fit: const {} lin {} base {} (sse {:.3e})",
        result.params.const_term, result.params.lin_term, result.params.base, result.sse
    );
    let mut out = OutputDir::create(&ctx.out, ctx.format)?;
    out.table("fit", &rows)?;
    let mut manifest = Manifest::new("fit", ctx.seed, section);
    manifest.results = json!({
        "w": w,
        "const": result.params.const_term,
        "lin": result.params.lin_term,
        "base": result.params.base,
        "sse": result.sse,
        "guarded": result.guarded,
    });
    manifest.finish(&mut out)
}

fn load_trace(t: &TraceInput, slot_len_s: i64) -> Result<(SlottedTrace, serde_json::Value), AppError> {
    let format = match t.format {
        TraceFormatName::Cabspotting => TraceFormat::Cabspotting,
        TraceFormatName::Csv => TraceFormat::Csv,
    };
    let mut ingested = ingest(&t.path, format, IngestOptions { skip_malformed: t.skip_malformed })?;
    let total = ingested.records.len();
    ingested.records.retain(|r| {
        t.start_time.is_none_or(|s| r.timestamp >= s) && t.end_time.is_none_or(|e| r.timestamp < e)
    });
    if ingested.records.is_empty() {
        return Err(TraceError::Empty { path: t.path.clone() }.into());
    }
    info!(
        "simulate: {} records from {} entities ({} reordered, {} malformed, {} outside the time range)",
        ingested.records.len(),
        ingested.entity_count(),
        ingested.reordered,
        ingested.malformed,
        total - ingested.records.len()
    );
    let tess = TessellationConfig {
        cell_separation_m: t.cell_separation_m,
        slot_len_s,
        origin: None,
        gap_carry_slots: t.gap_carry_slots,
    };
    let slotted = tessellate(&ingested.records, &tess)?;
    let stats = json!({
        "records": ingested.records.len(),
        "entities": ingested.entity_count(),
        "files": ingested.files,
        "reordered": ingested.reordered,
        "malformed": ingested.malformed,
        "filtered_out": total - ingested.records.len(),
    });
    Ok((slotted, stats))
}

#[derive(Serialize)]
struct SlotJson<'a> {
    slot: usize,
    time: i64,
    active: usize,
    r: f64,
    m_cur: usize,
    avg_cost: BTreeMap<&'a str, f64>,
}

fn write_slots(out: &mut OutputDir, slotted: &SlottedTrace, report: &SimReport, format: OutputFormat) -> Result<(), AppError> {
    let names: Vec<&str> = report.policies.iter().map(|k| k.name()).collect();
    let time = |slot: usize| slotted.start_time + slot as i64 * slotted.slot_len_s;
    match format {
        OutputFormat::Csv => {
            let mut header: Vec<String> = ["slot", "time", "active", "r", "m_cur"].map(String::from).to_vec();
            header.extend(names.iter().map(|n| format!("cost_{n}")));
            let rows: Vec<Vec<String>> = report
                .slots
                .iter()
                .map(|s| {
                    let mut row =
                        vec![s.slot.to_string(), time(s.slot).to_string(), s.active.to_string(), s.r.to_string(), s.m_cur.to_string()];
                    row.extend(s.avg_cost.iter().map(f64::to_string));
                    row
                })
                .collect();
            out.raw_csv("slots.csv", &header, &rows)?;
        }
        OutputFormat::Json => {
            let rows: Vec<SlotJson> = report
                .slots
                .iter()
                .map(|s| SlotJson {
                    slot: s.slot,
                    time: time(s.slot),
                    active: s.active,
                    r: s.r,
                    m_cur: s.m_cur,
                    avg_cost: names.iter().copied().zip(s.avg_cost.iter().copied()).collect(),
                })
                .collect();
            out.json("slots.json", &rows)?;
        }
    }
    Ok(())
}

pub fn simulate(cfg: &RunConfig, ctx: &RunContext) -> Result<PathBuf, AppError> {
    let section = RunConfig::section(&cfg.simulate, "simulate")?;
    let sim = section.to_sim_config()?;
    let (slotted, input_stats) = match section.mode {
        SimulationMode::Synthetic => {
            let s = section.synthetic.ok_or(ConfigError::MissingSection("simulate.synthetic"))?;
            let mut trace = synthetic_population(s.entities, s.slots, s.r, s.radius, ctx.seed);
            trace.slot_len_s = section.slot_s;
            (trace, json!({ "entities": s.entities, "slots": s.slots, "r": s.r, "radius": s.radius }))
        }
        SimulationMode::Trace => {
            let t = section.trace.as_ref().ok_or(ConfigError::MissingSection("simulate.trace"))?;
            load_trace(t, section.slot_s)?
        }
    };
    let start = Instant::now();
    let report = run_trace_simulation(&slotted, &sim)?;
    let elapsed = start.elapsed().as_secs_f64();
    for red in &report.reductions {
        info!(
            "simulate: reduction vs {}: {:.1}% (per-slot difference {:.4} +- {:.4})",
            red.baseline.name(),
            red.reduction * 100.0,
            red.mean_difference,
            red.difference_std_error
        );
    }

    let mut out = OutputDir::create(&ctx.out, ctx.format)?;
    write_slots(&mut out, &slotted, &report, ctx.format)?;
    let totals: Vec<_> = report
        .totals
        .iter()
        .map(|t| {
            json!({
                "policy": t.kind.name(),
                "total_cost": t.total_cost,
                "user_slots": t.user_slots,
                "mean_cost": t.mean_cost,
                "std_error": t.std_error,
            })
        })
        .collect();
    let reductions: Vec<_> = report
        .reductions
        .iter()
        .map(|r| {
            json!({
                "baseline": r.baseline.name(),
                "reduction": r.reduction,
                "mean_difference": r.mean_difference,
                "difference_std_error": r.difference_std_error,
            })
        })
        .collect();
    let r_series: Vec<_> = report.r_series.iter().map(|&(slot, r)| json!({ "slot": slot, "r": r })).collect();
    let summary = json!({
        "slots": slotted.n_slots,
        "entities": slotted.entities.len(),
        "input": input_stats,
        "totals": totals,
        "reductions": reductions,
        "r_series": r_series,
        "max_post_action_distance": report.max_post_action_distance,
        "overshoots": report.overshoots,
    });
    out.json("summary.json", &summary)?;
    let mut manifest = Manifest::new("simulate", ctx.seed, section);
    manifest.results = json!({ "reductions": summary["reductions"] });
    manifest.timing = json!({ "simulation_s": elapsed });
    manifest.finish(&mut out)
}
