//! Run configuration, read from a TOML file with one section per command.
//!
//! ```toml
//! seed = 7
//! out = "results"
//!
//! [solve_1d]
//! n_max = 10
//! gamma = 0.9
//! r = 0.1
//! migration_cost = { const = 1.5, lin = -0.5, base = 0.8 }
//! transmission_cost = { const = 1.0, lin = -1.0, base = 0.8 }
//! ```

use std::path::{Path, PathBuf};

use edgemig_core::cost_model::ConstPlusExpCost;
use edgemig_core::distance_mdp::{DistanceMdpSpec, MdpError};
use edgemig_core::hex_mdp::HexMdpSpec;
use edgemig_core::simulator::{PolicyKind, TraceSimConfig};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("config: {0}")]
    Parse(String),
    #[error("config: missing section [{0}]")]
    MissingSection(&'static str),
    #[error("config: invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.into(), reason: reason.into() }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub solve_1d: Option<Solve1dConfig>,
    pub solve_2d: Option<Solve2dConfig>,
    pub sweep: Option<SweepConfig>,
    pub fit: Option<FitConfig>,
    pub simulate: Option<SimulateConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostParams {
    #[serde(rename = "const")]
    pub const_term: f64,
    #[serde(rename = "lin")]
    pub lin_term: f64,
    pub base: f64,
}

impl From<CostParams> for ConstPlusExpCost {
    fn from(c: CostParams) -> Self {
        ConstPlusExpCost::new(c.const_term, c.lin_term, c.base)
    }
}

impl From<ConstPlusExpCost> for CostParams {
    fn from(c: ConstPlusExpCost) -> Self {
        CostParams { const_term: c.const_term, lin_term: c.lin_term, base: c.base }
    }
}

/// Distance MDP. Give either `r` (symmetric walk: `p = q = r`, `p0 = 2r`) or
/// all of `p0`, `p`, `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Solve1dConfig {
    #[serde(alias = "N")]
    pub n_max: usize,
    pub gamma: f64,
    pub r: Option<f64>,
    pub p0: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub migration_cost: CostParams,
    pub transmission_cost: CostParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    Exact,
    Approx,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExactSolver {
    PolicyIteration,
    ValueIteration,
}

fn default_method() -> SolveMethod {
    SolveMethod::Both
}

fn default_exact_solver() -> ExactSolver {
    ExactSolver::PolicyIteration
}

fn default_tolerance() -> f64 {
    1e-10
}

/// Hexagon MDP. `r` is drawn uniformly from `(0, 1/6]` with the run seed
/// when omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Solve2dConfig {
    #[serde(alias = "N")]
    pub n_max: usize,
    pub gamma: f64,
    pub r: Option<f64>,
    #[serde(default = "default_method")]
    pub method: SolveMethod,
    #[serde(default = "default_exact_solver")]
    pub exact_solver: ExactSolver,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    pub migration_cost: CostParams,
    pub transmission_cost: CostParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    NegBetaL,
    Gamma,
}

fn default_sweep_parameter() -> SweepParameter {
    SweepParameter::NegBetaL
}

fn default_gammas() -> Vec<f64> {
    vec![0.5, 0.9, 0.99]
}

fn default_base() -> f64 {
    0.8
}

fn one() -> f64 {
    1.0
}

fn minus_one() -> f64 {
    -1.0
}

/// Cost family `c_d = delta_c + delta_l theta^x`,
/// `c_m = (beta_sum - beta_l) + beta_l mu^x` with `beta_l = -x` for each
/// sweep value `x` of `neg_beta_l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(alias = "N")]
    pub n_max: usize,
    pub r: Option<f64>,
    #[serde(default = "default_sweep_parameter")]
    pub parameter: SweepParameter,
    /// Swept values of the chosen parameter.
    pub values: Vec<f64>,
    /// One output file per discount factor when sweeping `neg_beta_l`.
    #[serde(default = "default_gammas")]
    pub gammas: Vec<f64>,
    /// Fixed `-beta_l` when sweeping `gamma`.
    pub neg_beta_l: Option<f64>,
    #[serde(default = "default_base")]
    pub theta: f64,
    #[serde(default = "default_base")]
    pub mu: f64,
    #[serde(default = "one")]
    pub delta_c: f64,
    #[serde(default = "minus_one")]
    pub delta_l: f64,
    #[serde(default = "one")]
    pub beta_sum: f64,
}

/// Tabulated cost to fit: either inline `values` or a CSV `input` with a
/// `value` column, holding `f(0), ..., f(2W)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub input: Option<PathBuf>,
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimulationMode {
    Synthetic,
    Trace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceFormatName {
    Cabspotting,
    Csv,
}

fn default_policies() -> Vec<String> {
    PolicyKind::ALL.iter().map(|k| k.name().to_string()).collect()
}

fn default_gap_carry() -> usize {
    edgemig_core::simulator::DEFAULT_GAP_CARRY_SLOTS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub mode: SimulationMode,
    /// Slot length in seconds.
    #[serde(rename = "T")]
    pub slot_s: i64,
    /// Policy update interval in seconds.
    #[serde(rename = "T_u")]
    pub update_s: i64,
    /// Estimation window in seconds.
    #[serde(rename = "T_w")]
    pub window_s: i64,
    #[serde(alias = "N")]
    pub n_max: usize,
    pub gamma: f64,
    #[serde(rename = "R_t")]
    pub r_t: f64,
    #[serde(rename = "R_p")]
    pub r_p: f64,
    #[serde(default = "default_base")]
    pub cost_base: f64,
    #[serde(default = "default_policies")]
    pub policies: Vec<String>,
    pub trace: Option<TraceInput>,
    pub synthetic: Option<SyntheticInput>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceInput {
    pub path: PathBuf,
    pub format: TraceFormatName,
    pub cell_separation_m: f64,
    /// Keep fixes at or after this epoch second.
    pub start_time: Option<i64>,
    /// Keep fixes before this epoch second.
    pub end_time: Option<i64>,
    #[serde(default)]
    pub skip_malformed: bool,
    #[serde(default = "default_gap_carry")]
    pub gap_carry_slots: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticInput {
    pub entities: usize,
    pub slots: usize,
    pub r: f64,
    /// Walkers stay within this many hops of the world origin.
    pub radius: u32,
}

/// Prefixes a core validation error with the config section.
fn spec_error(section: &str, e: MdpError) -> ConfigError {
    match e {
        MdpError::InvalidSpec { field, reason } => {
            let key = if field == "move_prob" { "r" } else { field };
            invalid(format!("{section}.{key}"), reason)
        }
        other => invalid(section, other.to_string()),
    }
}

fn check_prob(field: &str, v: f64, hi: f64) -> Result<(), ConfigError> {
    if v.is_finite() && (0.0..=hi).contains(&v) {
        Ok(())
    } else {
        Err(invalid(field, format!("must lie in [0, {hi}]")))
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        toml::from_str(s).map_err(|e| ConfigError::Parse(e.message().to_string()))
    }

    pub fn section<'a, T>(section: &'a Option<T>, name: &'static str) -> Result<&'a T, ConfigError> {
        section.as_ref().ok_or(ConfigError::MissingSection(name))
    }
}

impl Solve1dConfig {
    pub fn to_spec(&self) -> Result<DistanceMdpSpec, ConfigError> {
        let mc = self.migration_cost.into();
        let cd = self.transmission_cost.into();
        let spec = match (self.r, self.p0, self.p, self.q) {
            (Some(r), None, None, None) => {
                check_prob("solve_1d.r", r, 0.5)?;
                DistanceMdpSpec::from_random_walk_1d(self.n_max, r, self.gamma, mc, cd)
            }
            (None, Some(p0), Some(p), Some(q)) => DistanceMdpSpec {
                n_max: self.n_max,
                p0,
                p,
                q,
                gamma: self.gamma,
                migration_cost: mc,
                transmission_cost: cd,
            },
            (None, ..) => return Err(invalid("solve_1d.r", "give either r or all of p0, p, q")),
            (Some(_), ..) => return Err(invalid("solve_1d.r", "r cannot be combined with p0, p, q")),
        };
        spec.validate().map_err(|e| spec_error("solve_1d", e))?;
        Ok(spec)
    }
}

/// Uniform draw from `(0, 1/6]`.
pub fn random_move_prob(seed: u64) -> f64 {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    1.0 / 6.0 - rng.random_range(0.0..1.0 / 6.0)
}

impl Solve2dConfig {
    pub fn to_spec(&self, seed: u64) -> Result<HexMdpSpec, ConfigError> {
        let spec = HexMdpSpec {
            n_max: self.n_max,
            move_prob: self.r.unwrap_or_else(|| random_move_prob(seed)),
            gamma: self.gamma,
            migration_cost: self.migration_cost.into(),
            transmission_cost: self.transmission_cost.into(),
        };
        spec.validate().map_err(|e| spec_error("solve_2d", e))?;
        if !(self.tolerance > 0.0) {
            return Err(invalid("solve_2d.tolerance", "must be positive"));
        }
        Ok(spec)
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.values.is_empty() {
            return Err(invalid("sweep.values", "sweep grid is empty"));
        }
        match self.parameter {
            SweepParameter::NegBetaL => {
                if self.gammas.is_empty() {
                    return Err(invalid("sweep.gammas", "at least one discount factor is required"));
                }
            }
            SweepParameter::Gamma => {
                if self.neg_beta_l.is_none() {
                    return Err(invalid("sweep.neg_beta_l", "required when sweeping gamma"));
                }
            }
        }
        if let Some(r) = self.r {
            check_prob("sweep.r", r, 1.0 / 6.0)?;
        }
        // every grid point must give a valid spec
        for (gamma, x) in self.grid() {
            self.spec(gamma, x, 0.1).validate().map_err(|e| spec_error("sweep", e))?;
        }
        Ok(())
    }

    /// `(gamma, -beta_l)` pairs in output order.
    pub fn grid(&self) -> Vec<(f64, f64)> {
        match self.parameter {
            SweepParameter::NegBetaL => {
                self.gammas.iter().flat_map(|&g| self.values.iter().map(move |&x| (g, x))).collect()
            }
            SweepParameter::Gamma => {
                let x = self.neg_beta_l.unwrap_or(0.0);
                self.values.iter().map(|&g| (g, x)).collect()
            }
        }
    }

    pub fn spec(&self, gamma: f64, neg_beta_l: f64, r: f64) -> HexMdpSpec {
        let beta_l = -neg_beta_l;
        HexMdpSpec {
            n_max: self.n_max,
            move_prob: r,
            gamma,
            migration_cost: ConstPlusExpCost::new(self.beta_sum - beta_l, beta_l, self.mu),
            transmission_cost: ConstPlusExpCost::new(self.delta_c, self.delta_l, self.theta),
        }
    }
}

impl SimulateConfig {
    fn slots_of(&self, field: &str, seconds: i64) -> Result<usize, ConfigError> {
        if seconds <= 0 || seconds % self.slot_s != 0 {
            return Err(invalid(format!("simulate.{field}"), "must be a positive multiple of T"));
        }
        Ok((seconds / self.slot_s) as usize)
    }

    pub fn to_sim_config(&self) -> Result<TraceSimConfig, ConfigError> {
        if self.slot_s <= 0 {
            return Err(invalid("simulate.T", "must be positive"));
        }
        let policies = self
            .policies
            .iter()
            .map(|name| {
                PolicyKind::from_name(name).ok_or_else(|| {
                    invalid("simulate.policies", format!("unknown policy `{name}` (proposed, never, always, myopic)"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let config = TraceSimConfig {
            update_interval_slots: self.slots_of("T_u", self.update_s)?,
            window_slots: self.slots_of("T_w", self.window_s)?,
            n_max: self.n_max,
            gamma: self.gamma,
            r_t: self.r_t,
            r_p: self.r_p,
            cost_base: self.cost_base,
            policies,
        };
        config.validate().map_err(|e| match e {
            edgemig_core::simulator::SimError::InvalidConfig { field, reason } => {
                invalid(format!("simulate.{field}"), reason)
            }
            other => invalid("simulate", other.to_string()),
        })?;
        if !(0.0..=1.0).contains(&self.cost_base) {
            return Err(invalid("simulate.cost_base", "must lie in [0, 1]"));
        }
        match self.mode {
            SimulationMode::Trace => {
                let t = self.trace.as_ref().ok_or(ConfigError::MissingSection("simulate.trace"))?;
                if !(t.cell_separation_m > 0.0) {
                    return Err(invalid("simulate.trace.cell_separation_m", "must be positive"));
                }
            }
            SimulationMode::Synthetic => {
                let s = self.synthetic.ok_or(ConfigError::MissingSection("simulate.synthetic"))?;
                check_prob("simulate.synthetic.r", s.r, 1.0 / 6.0)?;
                if s.entities == 0 || s.slots == 0 {
                    return Err(invalid("simulate.synthetic", "entities and slots must be positive"));
                }
            }
        }
        Ok(config)
    }
}

pub fn load(path: &Path) -> Result<RunConfig, crate::AppError> {
    let text = std::fs::read_to_string(path).map_err(|e| crate::AppError::io(path, e))?;
    Ok(RunConfig::from_toml_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SOLVE_1D: &str = r#"
        [solve_1d]
        n_max = 10
        gamma = 0.9
        r = 0.1
        migration_cost = { const = 1.5, lin = -0.5, base = 0.8 }
        transmission_cost = { const = 1.0, lin = -1.0, base = 0.8 }
    "#;

    #[test]
    fn parses_distance_section() {
        let cfg = RunConfig::from_toml_str(SOLVE_1D).unwrap();
        let spec = cfg.solve_1d.unwrap().to_spec().unwrap();
        assert_eq!((spec.p0, spec.p, spec.q), (0.2, 0.1, 0.1));
        assert_eq!(spec.migration_cost, ConstPlusExpCost::new(1.5, -0.5, 0.8));
        assert_eq!(cfg.seed, 0);
    }

    #[test]
    fn missing_gamma_names_the_field() {
        let err = RunConfig::from_toml_str(&SOLVE_1D.replace("gamma = 0.9", "")).unwrap_err();
        assert!(err.to_string().contains("gamma"), "{err}");
    }

    #[test]
    fn out_of_range_values_name_the_field() {
        let cfg = RunConfig::from_toml_str(&SOLVE_1D.replace("gamma = 0.9", "gamma = 1.5")).unwrap();
        let err = cfg.solve_1d.unwrap().to_spec().unwrap_err();
        assert_eq!(err, invalid("solve_1d.gamma", "must lie in (0, 1)"));

        let cfg = RunConfig::from_toml_str(&SOLVE_1D.replace("lin = -1.0", "lin = 1.0")).unwrap();
        let err = cfg.solve_1d.unwrap().to_spec().unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { ref field, .. } if field == "solve_1d.transmission_cost"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::from_toml_str(&SOLVE_1D.replace("r = 0.1", "r = 0.1\nrr = 2")).unwrap_err();
        assert!(err.to_string().contains("rr"), "{err}");
    }

    #[test]
    fn simulate_intervals_must_divide_slot_length() {
        let text = r#"
            [simulate]
            mode = "synthetic"
            T = 60
            T_u = 90
            T_w = 3600
            N = 10
            gamma = 0.9
            R_t = 1.5
            R_p = 1.5
            synthetic = { entities = 10, slots = 20, r = 0.05, radius = 3 }
        "#;
        let cfg = RunConfig::from_toml_str(text).unwrap();
        let err = cfg.simulate.as_ref().unwrap().to_sim_config().unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { ref field, .. } if field == "simulate.T_u"));
        let ok = RunConfig::from_toml_str(&text.replace("T_u = 90", "T_u = 120")).unwrap();
        let sim = ok.simulate.unwrap().to_sim_config().unwrap();
        assert_eq!((sim.update_interval_slots, sim.window_slots, sim.n_max), (2, 60, 10));
        assert_eq!(sim.policies, PolicyKind::ALL.to_vec());
    }

    #[test]
    fn random_move_prob_is_seeded_and_in_range() {
        let a = random_move_prob(3);
        assert_eq!(a, random_move_prob(3));
        assert!(a > 0.0 && a <= 1.0 / 6.0);
    }

    #[test]
    fn sweep_rejects_empty_grid() {
        let text = "[sweep]\nn_max = 10\nvalues = []\n";
        let cfg = RunConfig::from_toml_str(text).unwrap();
        assert_eq!(cfg.sweep.unwrap().validate(), Err(invalid("sweep.values", "sweep grid is empty")));
    }
}
