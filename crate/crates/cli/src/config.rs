//! Experiment configuration: a strict TOML schema with documented defaults.
//!
//! Every key is optional down to the section level; omitted sections fall
//! back to the built-in defaults so each subcommand runs out of the box.
//! Unknown keys are rejected everywhere — configs either mean exactly what
//! they say or they fail.
//!
//! ```toml
//! seed = 42
//! output_path = "out.csv"
//!
//! [scenario]
//! total_budget = 10.0
//!
//! [[scenario.nodes]]
//! attack_effort = 1.0        # attacker resources aimed at the node
//! valuation = 1.0            # cost per unit time spent compromised
//! half_saturation = 1.0      # diminishing-returns constant of recovery
//! preexisting_defense = 0.1  # recovery resources in place before reaction
//!
//! [[scenario.sensors]]
//! true_positive = 0.9
//! false_positive = 0.1
//!
//! [optimizer]
//! starts = 6
//! max_iterations = 500
//! convergence_tol = 1e-6
//! fd_step_fraction = 1e-4
//!
//! [sweep]                    # keys depend on the subcommand, see below
//! q_fixed = [0.0, 0.25, 0.5]
//!
//! [validate]
//! episodes = 1000000
//! preventive_fractions = [0.0, 0.25, 0.5]
//! ```
//!
//! Sweep keys per subcommand: `fig3` takes `p_values`/`q_fixed`, `fig4`
//! takes `q_values`/`p_fixed`, `fig5` takes `p_values`/`q_values`, `fig6`
//! takes `gamma1_values`/`gamma2_fixed`/`reactive_budget`. Keys that a
//! subcommand does not read are rejected rather than silently ignored.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use secalloc_core::model::{NodeParams, Scenario, SensorModel};
use secalloc_core::optimizer::OptimizerConfig;
use secalloc_core::Error as CoreError;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_EPISODES: u64 = 1_000_000;

/// Failure modes of a run, mapped onto process exit codes.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Configuration could not be parsed or validated (exit 2).
    Config(String),
    /// The computation has no finite answer (exit 3).
    Numeric(String),
    /// Reading or writing a file failed (exit 4).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Numeric(msg) => write!(f, "numerical failure: {msg}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::NoFiniteOptimum | CoreError::InfiniteAnalyticCost => {
                CliError::Numeric(err.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

// ---------------------------------------------------------------------------
// Raw TOML schema
// ---------------------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub seed: Option<u64>,
    pub output_path: Option<String>,
    pub scenario: Option<RawScenario>,
    pub optimizer: Option<RawOptimizer>,
    pub sweep: Option<RawSweep>,
    pub validate: Option<RawValidate>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScenario {
    pub total_budget: f64,
    pub nodes: Vec<RawNode>,
    /// One per node; a single entry broadcasts to every node; omitted
    /// entirely defaults to (0.9, 0.1) everywhere.
    pub sensors: Option<Vec<RawSensor>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawNode {
    pub attack_effort: f64,
    pub valuation: f64,
    pub half_saturation: f64,
    pub preexisting_defense: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSensor {
    pub true_positive: f64,
    pub false_positive: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOptimizer {
    pub starts: Option<usize>,
    pub max_iterations: Option<usize>,
    pub convergence_tol: Option<f64>,
    pub fd_step_fraction: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSweep {
    pub p_values: Option<Vec<f64>>,
    pub q_values: Option<Vec<f64>>,
    pub q_fixed: Option<Vec<f64>>,
    pub p_fixed: Option<Vec<f64>>,
    pub gamma1_values: Option<Vec<f64>>,
    pub gamma2_fixed: Option<Vec<f64>>,
    pub reactive_budget: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawValidate {
    pub episodes: Option<u64>,
    pub preventive_fractions: Option<Vec<f64>>,
}

/// Parse a config file, or return the all-defaults config when no path is
/// given.
pub fn load_config(path: Option<&Path>) -> Result<RawConfig, CliError> {
    let Some(path) = path else {
        return Ok(RawConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// Resolution to validated run inputs
// ---------------------------------------------------------------------------

/// Scenario, optimizer and seed shared by every subcommand.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub scenario: Scenario,
    pub optimizer: OptimizerConfig,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
}

/// Built-in scenario: two identical nodes under unit attack effort with a
/// small pre-existing defense (so no budget split has infinite cost), total
/// budget 10, sensors (0.9, 0.1).
pub fn default_scenario() -> Scenario {
    let node = NodeParams::new(1.0, 1.0, 1.0, 0.1).expect("static parameters");
    let sensor = SensorModel::new(0.9, 0.1).expect("static parameters");
    Scenario::new(vec![node; 2], vec![sensor; 2], 10.0).expect("static parameters")
}

pub fn resolve_common(raw: &RawConfig, seed_override: Option<u64>) -> Result<Resolved, CliError> {
    let seed = seed_override.or(raw.seed).unwrap_or(DEFAULT_SEED);

    let scenario = match &raw.scenario {
        None => default_scenario(),
        Some(rs) => {
            let nodes: Vec<NodeParams> = rs
                .nodes
                .iter()
                .map(|n| {
                    NodeParams::new(
                        n.attack_effort,
                        n.valuation,
                        n.half_saturation,
                        n.preexisting_defense,
                    )
                })
                .collect::<Result<_, _>>()?;
            let sensors: Vec<SensorModel> = match &rs.sensors {
                None => vec![SensorModel::new(0.9, 0.1)?; nodes.len()],
                Some(list) if list.len() == 1 => {
                    vec![
                        SensorModel::new(list[0].true_positive, list[0].false_positive)?;
                        nodes.len()
                    ]
                }
                Some(list) => list
                    .iter()
                    .map(|s| SensorModel::new(s.true_positive, s.false_positive))
                    .collect::<Result<_, _>>()?,
            };
            Scenario::new(nodes, sensors, rs.total_budget)?
        }
    };

    let defaults = OptimizerConfig::defaults_for(scenario.node_count());
    let ro = raw.optimizer.as_ref();
    let optimizer = OptimizerConfig {
        starts: ro.and_then(|o| o.starts).unwrap_or(defaults.starts),
        max_iterations: ro
            .and_then(|o| o.max_iterations)
            .unwrap_or(defaults.max_iterations),
        convergence_tol: ro
            .and_then(|o| o.convergence_tol)
            .unwrap_or(defaults.convergence_tol),
        fd_step_fraction: ro
            .and_then(|o| o.fd_step_fraction)
            .unwrap_or(defaults.fd_step_fraction),
        seed,
    };
    optimizer.validate()?;

    Ok(Resolved {
        scenario,
        optimizer,
        seed,
        output_path: raw.output_path.as_ref().map(PathBuf::from),
    })
}

// ---------------------------------------------------------------------------
// Per-subcommand sweep specs
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Fig3Spec {
    pub p_values: Vec<f64>,
    pub q_fixed: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Fig4Spec {
    pub q_values: Vec<f64>,
    pub p_fixed: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Fig5Spec {
    pub p_values: Vec<f64>,
    pub q_values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Fig6Spec {
    pub gamma1_values: Vec<f64>,
    pub gamma2_fixed: Vec<f64>,
    pub reactive_budget: f64,
    pub nodes: Vec<NodeParams>,
}

#[derive(Debug, Clone)]
pub struct ValidateSpec {
    pub episodes: u64,
    pub preventive_fractions: Vec<f64>,
}

/// Evenly spaced grid including both endpoints.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points <= 1 {
        return vec![lo];
    }
    (0..points)
        .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
        .collect()
}

fn default_p_grid() -> Vec<f64> {
    linspace(0.5, 1.0, 11)
}

fn default_q_grid() -> Vec<f64> {
    linspace(0.0, 0.5, 11)
}

fn default_gamma_grid() -> Vec<f64> {
    (1..100).map(|k| k as f64 / 100.0).collect()
}

fn check_range(values: &[f64], lo: f64, hi: f64, key: &str) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(CliError::Config(format!("sweep.{key} must not be empty")));
    }
    for &v in values {
        if !(v.is_finite() && (lo..=hi).contains(&v)) {
            return Err(CliError::Config(format!(
                "sweep.{key} value {v} outside [{lo}, {hi}]"
            )));
        }
    }
    Ok(())
}

fn forbid<T>(value: &Option<T>, key: &str, subcommand: &str) -> Result<(), CliError> {
    if value.is_some() {
        return Err(CliError::Config(format!(
            "sweep.{key} is not read by `{subcommand}`"
        )));
    }
    Ok(())
}

pub fn resolve_fig3(raw: &RawConfig) -> Result<Fig3Spec, CliError> {
    let sweep = raw.sweep.as_ref();
    if let Some(s) = sweep {
        forbid(&s.q_values, "q_values", "fig3")?;
        forbid(&s.p_fixed, "p_fixed", "fig3")?;
        forbid(&s.gamma1_values, "gamma1_values", "fig3")?;
        forbid(&s.gamma2_fixed, "gamma2_fixed", "fig3")?;
        forbid(&s.reactive_budget, "reactive_budget", "fig3")?;
    }
    let p_values = sweep
        .and_then(|s| s.p_values.clone())
        .unwrap_or_else(default_p_grid);
    let q_fixed = sweep
        .and_then(|s| s.q_fixed.clone())
        .unwrap_or_else(|| vec![0.0, 0.25, 0.5]);
    check_range(&p_values, 0.5, 1.0, "p_values")?;
    check_range(&q_fixed, 0.0, 0.5, "q_fixed")?;
    Ok(Fig3Spec { p_values, q_fixed })
}

pub fn resolve_fig4(raw: &RawConfig) -> Result<Fig4Spec, CliError> {
    let sweep = raw.sweep.as_ref();
    if let Some(s) = sweep {
        forbid(&s.p_values, "p_values", "fig4")?;
        forbid(&s.q_fixed, "q_fixed", "fig4")?;
        forbid(&s.gamma1_values, "gamma1_values", "fig4")?;
        forbid(&s.gamma2_fixed, "gamma2_fixed", "fig4")?;
        forbid(&s.reactive_budget, "reactive_budget", "fig4")?;
    }
    let q_values = sweep
        .and_then(|s| s.q_values.clone())
        .unwrap_or_else(default_q_grid);
    let p_fixed = sweep
        .and_then(|s| s.p_fixed.clone())
        .unwrap_or_else(|| vec![0.5, 0.75, 1.0]);
    check_range(&q_values, 0.0, 0.5, "q_values")?;
    check_range(&p_fixed, 0.5, 1.0, "p_fixed")?;
    Ok(Fig4Spec { q_values, p_fixed })
}

pub fn resolve_fig5(raw: &RawConfig) -> Result<Fig5Spec, CliError> {
    let sweep = raw.sweep.as_ref();
    if let Some(s) = sweep {
        forbid(&s.q_fixed, "q_fixed", "fig5")?;
        forbid(&s.p_fixed, "p_fixed", "fig5")?;
        forbid(&s.gamma1_values, "gamma1_values", "fig5")?;
        forbid(&s.gamma2_fixed, "gamma2_fixed", "fig5")?;
        forbid(&s.reactive_budget, "reactive_budget", "fig5")?;
    }
    let p_values = sweep
        .and_then(|s| s.p_values.clone())
        .unwrap_or_else(default_p_grid);
    let q_values = sweep
        .and_then(|s| s.q_values.clone())
        .unwrap_or_else(default_q_grid);
    check_range(&p_values, 0.5, 1.0, "p_values")?;
    check_range(&q_values, 0.0, 0.5, "q_values")?;
    Ok(Fig5Spec { p_values, q_values })
}

/// Fixed-belief sweep: priors are exogenous here, so the node list only
/// supplies (v, eps, delta) and the reactive budget is spent whole. The
/// built-in default is two unit nodes with no pre-existing defense and a
/// reactive budget of 2.
pub fn resolve_fig6(raw: &RawConfig) -> Result<Fig6Spec, CliError> {
    let sweep = raw.sweep.as_ref();
    if let Some(s) = sweep {
        forbid(&s.p_values, "p_values", "fig6")?;
        forbid(&s.q_values, "q_values", "fig6")?;
        forbid(&s.q_fixed, "q_fixed", "fig6")?;
        forbid(&s.p_fixed, "p_fixed", "fig6")?;
    }
    let gamma1_values = sweep
        .and_then(|s| s.gamma1_values.clone())
        .unwrap_or_else(default_gamma_grid);
    let gamma2_fixed = sweep
        .and_then(|s| s.gamma2_fixed.clone())
        .unwrap_or_else(|| vec![0.25, 0.5, 0.75]);
    let reactive_budget = sweep.and_then(|s| s.reactive_budget).unwrap_or(2.0);
    check_range(&gamma1_values, 0.0, 1.0, "gamma1_values")?;
    check_range(&gamma2_fixed, 0.0, 1.0, "gamma2_fixed")?;
    if !(reactive_budget.is_finite() && reactive_budget > 0.0) {
        return Err(CliError::Config(format!(
            "sweep.reactive_budget must be finite and > 0, got {reactive_budget}"
        )));
    }

    let nodes = match &raw.scenario {
        None => vec![NodeParams::new(1.0, 1.0, 1.0, 0.0).expect("static parameters"); 2],
        Some(rs) => rs
            .nodes
            .iter()
            .map(|n| {
                NodeParams::new(
                    n.attack_effort,
                    n.valuation,
                    n.half_saturation,
                    n.preexisting_defense,
                )
            })
            .collect::<Result<_, _>>()?,
    };
    if nodes.len() != 2 {
        return Err(CliError::Config(format!(
            "fig6 sweeps a two-node system; the scenario has {} nodes",
            nodes.len()
        )));
    }
    Ok(Fig6Spec {
        gamma1_values,
        gamma2_fixed,
        reactive_budget,
        nodes,
    })
}

pub fn resolve_validate(raw: &RawConfig) -> Result<ValidateSpec, CliError> {
    let rv = raw.validate.as_ref();
    let episodes = rv.and_then(|v| v.episodes).unwrap_or(DEFAULT_EPISODES);
    if episodes == 0 {
        return Err(CliError::Config("validate.episodes must be >= 1".into()));
    }
    let preventive_fractions = rv
        .and_then(|v| v.preventive_fractions.clone())
        .unwrap_or_else(|| vec![0.0, 0.25, 0.5]);
    check_range(&preventive_fractions, 0.0, 1.0, "preventive_fractions")
        .map_err(|_| CliError::Config("validate.preventive_fractions must lie in [0, 1]".into()))?;
    Ok(ValidateSpec {
        episodes,
        preventive_fractions,
    })
}
