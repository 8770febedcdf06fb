//! The experiment sweeps behind each subcommand.
//!
//! Sweep points are independent and dispatched through the core execution
//! helpers (parallel under the default feature set); rows come back in
//! deterministic sweep order regardless of thread count.

use secalloc_core::cost::expected_cost_exact;
use secalloc_core::exec::map_indexed;
use secalloc_core::mc::{simulate, SimulationReport};
use secalloc_core::metrics::{gamma_improvement, ImprovementPoint};
use secalloc_core::model::{
    compromise_prior, posterior, sample_signals, Scenario, SensorModel, SignalVector,
};
use secalloc_core::optimizer::{optimize_preventive, total_cost, OptimizerConfig, Optimum};
use secalloc_core::reactive::allocate_reactive;

use crate::config::{CliError, Fig3Spec, Fig4Spec, Fig5Spec, Fig6Spec, ValidateSpec};

/// Signal count up to which the optimize report tabulates the reactive
/// policy for every signal vector; larger systems tabulate sampled signals.
const POLICY_ENUMERATION_CAP: usize = 6;

/// Sampled policy-table size beyond the enumeration cap.
const POLICY_SAMPLES: usize = 64;

pub struct Fig3Row {
    pub p: f64,
    pub q_fixed: f64,
    pub sum_preventive: f64,
    pub optimal_cost: f64,
}

pub struct Fig4Row {
    pub q: f64,
    pub p_fixed: f64,
    pub sum_preventive: f64,
    pub optimal_cost: f64,
}

pub struct Fig5Row {
    pub p: f64,
    pub q: f64,
    pub improvement: f64,
}

pub struct Fig6Row {
    pub gamma1: f64,
    pub gamma2_fixed: f64,
    pub improvement: f64,
}

fn optimize_at(
    scenario: &Scenario,
    optimizer: &OptimizerConfig,
    p: f64,
    q: f64,
) -> Result<Optimum, CliError> {
    let sensor = SensorModel::new(p, q)?;
    Ok(optimize_preventive(
        &scenario.with_sensors_broadcast(sensor),
        optimizer,
    )?)
}

/// Total preventive spending and optimal cost across the true-positive grid,
/// one series per fixed false-positive rate.
pub fn run_fig3(
    scenario: &Scenario,
    optimizer: &OptimizerConfig,
    spec: &Fig3Spec,
) -> Result<Vec<Fig3Row>, CliError> {
    let points: Vec<(f64, f64)> = spec
        .q_fixed
        .iter()
        .flat_map(|&q| spec.p_values.iter().map(move |&p| (p, q)))
        .collect();
    map_indexed(points.len(), |k| {
        let (p, q) = points[k];
        let optimum = optimize_at(scenario, optimizer, p, q)?;
        Ok(Fig3Row {
            p,
            q_fixed: q,
            sum_preventive: optimum.preventive.iter().sum(),
            optimal_cost: optimum.objective,
        })
    })
    .into_iter()
    .collect()
}

/// Mirror of [`run_fig3`] across the false-positive grid.
pub fn run_fig4(
    scenario: &Scenario,
    optimizer: &OptimizerConfig,
    spec: &Fig4Spec,
) -> Result<Vec<Fig4Row>, CliError> {
    let points: Vec<(f64, f64)> = spec
        .p_fixed
        .iter()
        .flat_map(|&p| spec.q_values.iter().map(move |&q| (p, q)))
        .collect();
    map_indexed(points.len(), |k| {
        let (p, q) = points[k];
        let optimum = optimize_at(scenario, optimizer, p, q)?;
        Ok(Fig4Row {
            q,
            p_fixed: p,
            sum_preventive: optimum.preventive.iter().sum(),
            optimal_cost: optimum.objective,
        })
    })
    .into_iter()
    .collect()
}

/// Improvement over the uninformative baseline across the sensor grid.
///
/// The baseline leg is the same problem for every point, so it is solved
/// once; diagonal points are exactly zero by construction.
pub fn run_fig5(
    scenario: &Scenario,
    optimizer: &OptimizerConfig,
    spec: &Fig5Spec,
) -> Result<Vec<Fig5Row>, CliError> {
    let baseline_scenario = scenario.with_sensors_broadcast(SensorModel::UNINFORMATIVE);
    let cost_baseline = total_cost(&baseline_scenario, optimizer)?;
    if cost_baseline == 0.0 {
        return Err(CliError::Numeric(
            "baseline cost is zero; improvement is undefined".into(),
        ));
    }
    let points: Vec<(f64, f64)> = spec
        .p_values
        .iter()
        .flat_map(|&p| spec.q_values.iter().map(move |&q| (p, q)))
        .collect();
    map_indexed(points.len(), |k| {
        let (p, q) = points[k];
        let cost_with = if p == q {
            cost_baseline
        } else {
            total_cost(
                &scenario.with_sensors_broadcast(SensorModel::new(p, q)?),
                optimizer,
            )?
        };
        let point = ImprovementPoint::from_costs(p, q, cost_with, cost_baseline);
        Ok(Fig5Row {
            p,
            q,
            improvement: point.improvement,
        })
    })
    .into_iter()
    .collect()
}

/// Fixed-belief improvement sweep over the first node's compromise prior,
/// one series per fixed second prior.
pub fn run_fig6(spec: &Fig6Spec) -> Result<Vec<Fig6Row>, CliError> {
    let points: Vec<(f64, f64)> = spec
        .gamma2_fixed
        .iter()
        .flat_map(|&g2| spec.gamma1_values.iter().map(move |&g1| (g1, g2)))
        .collect();
    map_indexed(points.len(), |k| {
        let (g1, g2) = points[k];
        let point = gamma_improvement(&[g1, g2], &spec.nodes, spec.reactive_budget)?;
        Ok(Fig6Row {
            gamma1: g1,
            gamma2_fixed: g2,
            improvement: point.improvement,
        })
    })
    .into_iter()
    .collect()
}

/// One line of the optimize report.
pub enum OptimizeRow {
    /// The optimal expected cost.
    Objective(f64),
    /// One node's preventive allocation.
    Preventive { node: usize, value: f64 },
    /// One node's reactive allocation under a given signal vector.
    Reactive {
        signal: String,
        node: usize,
        value: f64,
    },
}

pub struct OptimizeReport {
    pub optimum: Optimum,
    pub rows: Vec<OptimizeRow>,
}

/// Solve the scenario and tabulate the induced reactive policy per signal.
pub fn run_optimize(
    scenario: &Scenario,
    optimizer: &OptimizerConfig,
) -> Result<OptimizeReport, CliError> {
    let optimum = optimize_preventive(scenario, optimizer)?;
    let n = scenario.node_count();
    let reactive_budget =
        (scenario.total_budget() - optimum.preventive.iter().sum::<f64>()).max(0.0);
    let priors: Vec<f64> = scenario
        .nodes()
        .iter()
        .zip(&optimum.preventive)
        .map(|(node, &x)| compromise_prior(node.attack_effort(), x))
        .collect::<Result<_, _>>()?;

    let mut rows = vec![OptimizeRow::Objective(optimum.objective)];
    for (node, &value) in optimum.preventive.iter().enumerate() {
        rows.push(OptimizeRow::Preventive { node, value });
    }

    let signals: Vec<SignalVector> = if n <= POLICY_ENUMERATION_CAP {
        // exact-cost reports carry the full enumeration already
        expected_cost_exact(&optimum.preventive, scenario)?
            .per_signal
            .expect("exact report")
            .into_iter()
            .map(|(v, _)| v)
            .collect()
    } else {
        // deduplicate seeded draws, first occurrence order
        let mut seen = std::collections::BTreeSet::new();
        sample_signals(&priors, scenario.sensors(), POLICY_SAMPLES, optimizer.seed)?
            .into_iter()
            .filter(|v| seen.insert(v.bits.clone()))
            .collect()
    };
    for signal in &signals {
        let posteriors: Vec<f64> = priors
            .iter()
            .zip(scenario.sensors())
            .zip(&signal.bits)
            .map(|((&g, &s), &alarm)| posterior(g, s, alarm))
            .collect();
        let response = allocate_reactive(&posteriors, scenario.nodes(), reactive_budget)?;
        let bit_string = signal.bit_string();
        for (node, &value) in response.allocations().iter().enumerate() {
            rows.push(OptimizeRow::Reactive {
                signal: bit_string.clone(),
                node,
                value,
            });
        }
    }
    Ok(OptimizeReport { optimum, rows })
}

pub struct ValidateRow {
    pub point: usize,
    pub fraction: f64,
    pub report: SimulationReport,
    /// Whether the row meets the 1% convergence bound on a finite cost.
    pub ok: bool,
}

/// Simulate the scenario at uniform preventive splits `t * X / n` and report
/// convergence against the analytic cost. Infinite-cost points are flagged
/// in their row rather than failing the run.
pub fn run_validate(
    scenario: &Scenario,
    spec: &ValidateSpec,
    seed: u64,
) -> Result<Vec<ValidateRow>, CliError> {
    let n = scenario.node_count();
    spec.preventive_fractions
        .iter()
        .enumerate()
        .map(|(point, &fraction)| {
            let preventive = vec![fraction * scenario.total_budget() / n as f64; n];
            let point_seed = seed.wrapping_add(point as u64);
            match simulate(scenario, &preventive, spec.episodes, point_seed) {
                Ok(report) => {
                    let ok = report.relative_error <= 0.01;
                    Ok(ValidateRow {
                        point,
                        fraction,
                        report,
                        ok,
                    })
                }
                Err(secalloc_core::Error::InfiniteAnalyticCost) => Ok(ValidateRow {
                    point,
                    fraction,
                    report: SimulationReport {
                        episodes: spec.episodes,
                        empirical_cost: f64::NAN,
                        analytic_cost: f64::INFINITY,
                        relative_error: f64::NAN,
                        seed: point_seed,
                        signal_frequency_error: f64::NAN,
                    },
                    ok: false,
                }),
                Err(other) => Err(other.into()),
            }
        })
        .collect()
}
