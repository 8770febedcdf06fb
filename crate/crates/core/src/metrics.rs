//! Value-of-sensing metrics.
//!
//! Two complementary views of what sensors are worth:
//!
//! * [`improvement`] re-optimizes the full two-stage problem for a candidate
//!   sensor and for the uninformative baseline and reports the fractional
//!   cost reduction `1 - J(p, q) / J(1/2, 1/2)`.
//! * The fixed-belief trio [`baseline_cost_no_sensor`],
//!   [`perfect_sensor_cost`] and [`gamma_improvement`] treat compromise
//!   probabilities as exogenous and devote the whole given budget to
//!   reaction, bracketing the information value between "allocate on priors"
//!   and "know the compromised set exactly".

use crate::cost::weighted_recovery_cost;
use crate::error::{Error, Result};
use crate::exec::{map_indexed, pairwise_sum};
use crate::model::{NodeParams, Scenario, SensorModel, EXACT_ENUMERATION_CAP};
use crate::optimizer::{total_cost, OptimizerConfig};
use crate::reactive::allocate_reactive;

/// Fractional cost reduction of one sensor quality over the uninformative
/// baseline, both legs fully re-optimized.
#[derive(Debug, Clone, PartialEq)]
pub struct ImprovementPoint {
    pub true_positive: f64,
    pub false_positive: f64,
    /// Optimal expected cost with the candidate sensor.
    pub cost_with_sensor: f64,
    /// Optimal expected cost with uninformative sensors.
    pub cost_baseline: f64,
    /// `1 - cost_with_sensor / cost_baseline`; at most 1, exactly 0 on the
    /// diagonal `p = q`.
    pub improvement: f64,
}

impl ImprovementPoint {
    /// Combine the two legs into an improvement value.
    ///
    /// On the diagonal `p = q` the two optimization problems coincide
    /// (posteriors equal priors for any common rate), so the improvement is
    /// exactly 0 rather than the float noise of dividing two independently
    /// rounded evaluations.
    pub fn from_costs(
        true_positive: f64,
        false_positive: f64,
        cost_with_sensor: f64,
        cost_baseline: f64,
    ) -> ImprovementPoint {
        let improvement = if true_positive == false_positive {
            0.0
        } else {
            1.0 - cost_with_sensor / cost_baseline
        };
        ImprovementPoint {
            true_positive,
            false_positive,
            cost_with_sensor,
            cost_baseline,
            improvement,
        }
    }
}

/// Fixed-belief improvement: perfect sensing versus allocating on priors.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaImprovementPoint {
    pub gammas: Vec<f64>,
    /// Expected cost when reaction is allocated against the priors.
    pub cost_no_sensor: f64,
    /// Expected cost when the compromised subset is known exactly.
    pub cost_perfect_sensor: f64,
    /// `1 - cost_perfect_sensor / cost_no_sensor`; 0 when both costs vanish.
    pub improvement: f64,
}

/// Value of a `(p, q)` sensor on a scenario: both legs are solved by the
/// same optimizer with the same seed, the candidate leg with `(p, q)`
/// broadcast to every node and the baseline leg with uninformative sensors.
///
/// Errors with [`Error::UndefinedImprovement`] if the baseline cost is zero.
pub fn improvement(
    scenario: &Scenario,
    true_positive: f64,
    false_positive: f64,
    config: &OptimizerConfig,
) -> Result<ImprovementPoint> {
    let sensor = SensorModel::new(true_positive, false_positive)?;
    let baseline = scenario.with_sensors_broadcast(SensorModel::UNINFORMATIVE);
    let cost_baseline = total_cost(&baseline, config)?;
    if cost_baseline == 0.0 {
        return Err(Error::UndefinedImprovement);
    }
    // An uninformative candidate poses the identical problem; evaluating it
    // separately would only add rounding noise to a mathematically exact 0.
    let cost_with_sensor = if sensor.is_uninformative() {
        cost_baseline
    } else {
        total_cost(&scenario.with_sensors_broadcast(sensor), config)?
    };
    Ok(ImprovementPoint::from_costs(
        true_positive,
        false_positive,
        cost_with_sensor,
        cost_baseline,
    ))
}

fn validate_gammas(gammas: &[f64], nodes: &[NodeParams]) -> Result<()> {
    if gammas.len() != nodes.len() {
        return Err(Error::LengthMismatch {
            what: "gammas",
            expected: nodes.len(),
            actual: gammas.len(),
        });
    }
    for &g in gammas {
        if !(g.is_finite() && (0.0..=1.0).contains(&g)) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                constraint: "in [0, 1]",
                value: g,
            });
        }
    }
    Ok(())
}

/// Expected cost with no sensor information: the whole `reactive_budget` is
/// allocated against the prior compromise probabilities.
pub fn baseline_cost_no_sensor(
    gammas: &[f64],
    nodes: &[NodeParams],
    reactive_budget: f64,
) -> Result<f64> {
    validate_gammas(gammas, nodes)?;
    let solution = allocate_reactive(gammas, nodes, reactive_budget)?;
    Ok(weighted_recovery_cost(
        gammas,
        nodes,
        solution.allocations(),
    ))
}

/// Expected cost with perfect sensing: every subset of compromised nodes is
/// weighted by its prior probability and the budget splits equally over it.
///
/// Defined for homogeneous node parameters only (identical valuation,
/// half-saturation and pre-existing defense); heterogeneous inputs are
/// rejected.
pub fn perfect_sensor_cost(
    gammas: &[f64],
    nodes: &[NodeParams],
    reactive_budget: f64,
) -> Result<f64> {
    validate_gammas(gammas, nodes)?;
    if !(reactive_budget.is_finite() && reactive_budget >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "reactive_budget",
            constraint: "finite and >= 0",
            value: reactive_budget,
        });
    }
    let n = nodes.len();
    if n == 0 {
        return Err(Error::LengthMismatch {
            what: "nodes",
            expected: 1,
            actual: 0,
        });
    }
    if n > EXACT_ENUMERATION_CAP {
        return Err(Error::EnumerationCapExceeded {
            nodes: n,
            cap: EXACT_ENUMERATION_CAP,
        });
    }
    let first = &nodes[0];
    let homogeneous = nodes.iter().all(|nd| {
        nd.valuation() == first.valuation()
            && nd.half_saturation() == first.half_saturation()
            && nd.preexisting_defense() == first.preexisting_defense()
    });
    if !homogeneous {
        return Err(Error::HeterogeneousNodes);
    }
    let (v, eps, delta) = (
        first.valuation(),
        first.half_saturation(),
        first.preexisting_defense(),
    );

    let terms: Vec<f64> = map_indexed(1usize << n, |mask| {
        let mut weight = 1.0;
        for (i, &g) in gammas.iter().enumerate() {
            weight *= if mask >> i & 1 == 1 { g } else { 1.0 - g };
        }
        let compromised = mask.count_ones() as f64;
        if compromised == 0.0 || weight == 0.0 {
            return 0.0;
        }
        let per_node = delta + reactive_budget / compromised;
        let recovery = if per_node == 0.0 {
            f64::INFINITY
        } else {
            1.0 + eps / per_node
        };
        weight * compromised * v * recovery
    });
    Ok(pairwise_sum(&terms))
}

/// Fixed-belief improvement `1 - J_p / J_n` of perfect sensing over
/// prior-only allocation. Both costs vanish exactly when every prior is
/// zero; the improvement is 0 there.
pub fn gamma_improvement(
    gammas: &[f64],
    nodes: &[NodeParams],
    reactive_budget: f64,
) -> Result<GammaImprovementPoint> {
    let cost_no_sensor = baseline_cost_no_sensor(gammas, nodes, reactive_budget)?;
    let cost_perfect_sensor = perfect_sensor_cost(gammas, nodes, reactive_budget)?;
    let improvement = if cost_no_sensor > 0.0 {
        1.0 - cost_perfect_sensor / cost_no_sensor
    } else {
        0.0
    };
    Ok(GammaImprovementPoint {
        gammas: gammas.to_vec(),
        cost_no_sensor,
        cost_perfect_sensor,
        improvement,
    })
}
