//! Monte Carlo validation of the analytic expected cost.
//!
//! An independent stochastic oracle: episodes simulate the generative model
//! directly — Bernoulli compromise draws, conditional signal draws, the
//! closed-form reactive response to the observed signals, and exponential
//! recovery times for the truly compromised nodes. By the tower property the
//! episode-mean cost converges to the analytic signal-averaged expectation,
//! so a small relative error at large episode counts cross-checks the whole
//! deterministic pipeline.
//!
//! Episode `e` draws from substream `e` of the seed (state, then signal, per
//! node in index order; then recovery times for compromised nodes in index
//! order), so reports are reproducible for any thread count.

use rand::Rng;

use crate::cost::{expected_cost_value, StageTwo};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, pairwise_sum_by};
use crate::model::{recovery_rate, signal_weight, Scenario};
use crate::rng::{sample_exponential, stream_rng};

/// Outcome of one simulation run against its analytic reference.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub episodes: u64,
    /// Mean episode cost.
    pub empirical_cost: f64,
    /// Exact signal-averaged expected cost of the same allocation.
    pub analytic_cost: f64,
    /// `|empirical - analytic| / analytic` (0 when both vanish).
    pub relative_error: f64,
    pub seed: u64,
    /// Largest absolute gap between empirical and analytic joint signal
    /// frequencies over all `2^n` signal vectors.
    pub signal_frequency_error: f64,
}

/// Simulate `episodes` attack/response rounds of the scenario under the
/// given preventive allocation.
///
/// Requires a finite analytic cost (simulating an infinite mean is
/// meaningless) and therefore a node count within the enumeration cap.
pub fn simulate(
    scenario: &Scenario,
    preventive: &[f64],
    episodes: u64,
    seed: u64,
) -> Result<SimulationReport> {
    if episodes == 0 {
        return Err(Error::InvalidParameter {
            name: "episodes",
            constraint: ">= 1",
            value: 0.0,
        });
    }
    let analytic = expected_cost_value(preventive, scenario)?;
    if !analytic.is_finite() {
        return Err(Error::InfiniteAnalyticCost);
    }

    let stage = StageTwo::new(preventive, scenario)?;
    let n = scenario.node_count();
    let nodes = scenario.nodes();
    let sensors = scenario.sensors();

    // (episode cost, joint signal index) with node 0 as the most
    // significant bit, matching the enumeration order.
    let outcomes: Vec<(f64, u32)> = map_indexed(episodes as usize, |e| {
        let mut rng = stream_rng(seed, e as u64);
        let mut compromised = 0u32;
        let mut bits = vec![false; n];
        for i in 0..n {
            let state = rng.random::<f64>() < stage.beliefs()[i].prior;
            let alarm_rate = if state {
                sensors[i].true_positive()
            } else {
                sensors[i].false_positive()
            };
            if state {
                compromised |= 1 << i;
            }
            bits[i] = rng.random::<f64>() < alarm_rate;
        }
        let posteriors = stage.posteriors_for_bits(&bits);
        let response =
            crate::reactive::allocate_reactive(&posteriors, nodes, stage.reactive_budget())
                .expect("validated posteriors");

        let mut cost = 0.0;
        for (i, node) in nodes.iter().enumerate() {
            if compromised >> i & 1 == 1 {
                let rate = recovery_rate(node, response.allocations()[i]);
                cost += node.valuation() * sample_exponential(&mut rng, rate);
            }
        }
        let mut index = 0u32;
        for (i, &bit) in bits.iter().enumerate() {
            if bit {
                index |= 1 << (n - 1 - i);
            }
        }
        (cost, index)
    });

    let empirical = pairwise_sum_by(&outcomes, |&(c, _)| c) / episodes as f64;

    let mut counts = vec![0u64; 1 << n];
    for &(_, index) in &outcomes {
        counts[index as usize] += 1;
    }
    let mut frequency_error = 0.0f64;
    for (k, &count) in counts.iter().enumerate() {
        let expected = signal_weight(k, stage.marginals());
        let observed = count as f64 / episodes as f64;
        frequency_error = frequency_error.max((observed - expected).abs());
    }

    let relative_error = if analytic > 0.0 {
        (empirical - analytic).abs() / analytic
    } else {
        0.0
    };
    Ok(SimulationReport {
        episodes,
        empirical_cost: empirical,
        analytic_cost: analytic,
        relative_error,
        seed,
        signal_frequency_error: frequency_error,
    })
}
