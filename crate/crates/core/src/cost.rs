//! Per-signal and expected cost of a preventive allocation.
//!
//! For a fixed preventive vector the remaining budget is reactive. Each
//! signal realization updates the beliefs, the reactive stage solves in
//! closed form, and the realized cost is the belief-weighted sum of expected
//! recovery times. The expected cost averages over the joint signal
//! distribution, either exactly over all `2^n` vectors or by seeded i.i.d.
//! sampling when `n` exceeds the enumeration cap.
//!
//! Per-signal evaluations are independent and run on the execution helpers
//! in `exec`; the final reduction is a pairwise sum in enumeration (or draw)
//! order, so results are bitwise reproducible regardless of parallelism.

use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::{map_indexed, pairwise_sum};
use crate::model::{
    compromise_prior, expected_recovery_time, signal_bit, signal_marginal, signal_weight, Belief,
    NodeParams, Scenario, SignalVector, EXACT_ENUMERATION_CAP,
};
use crate::reactive::allocate_reactive;
use crate::rng::stream_rng;

/// Draw count used when the expected cost must fall back to sampling.
pub const DEFAULT_SAMPLE_COUNT: u64 = 100_000;

/// Slack tolerated on the preventive budget check.
const BUDGET_SLACK: f64 = 1e-9;

/// How a [`CostReport`] was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostMethod {
    /// Full enumeration of the signal distribution.
    Exact,
    /// Seeded i.i.d. signal sampling.
    Sampled,
}

/// Expected cost of a preventive allocation, with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct CostReport {
    /// Signal-averaged cost; `+inf` if any positive-probability signal has
    /// infinite cost.
    pub expected_cost: f64,
    /// Per-signal `(vector, cost)` pairs in enumeration order; present for
    /// exact reports only.
    pub per_signal: Option<Vec<(SignalVector, f64)>>,
    pub method: CostMethod,
    /// Number of draws (0 for exact).
    pub sample_count: u64,
    /// Seed of the draws (0 for exact).
    pub seed: u64,
}

/// Stage-two evaluation state shared by every signal realization of one
/// preventive vector.
pub(crate) struct StageTwo<'a> {
    scenario: &'a Scenario,
    beliefs: Vec<Belief>,
    marginals: Vec<(f64, f64)>,
    reactive_budget: f64,
}

impl<'a> StageTwo<'a> {
    pub(crate) fn new(preventive: &[f64], scenario: &'a Scenario) -> Result<Self> {
        let n = scenario.node_count();
        if preventive.len() != n {
            return Err(Error::LengthMismatch {
                what: "preventive allocation",
                expected: n,
                actual: preventive.len(),
            });
        }
        let mut priors = Vec::with_capacity(n);
        for (node, &x) in scenario.nodes().iter().zip(preventive) {
            priors.push(compromise_prior(node.attack_effort(), x)?);
        }
        let spent: f64 = preventive.iter().sum();
        if spent > scenario.total_budget() + BUDGET_SLACK {
            return Err(Error::BudgetExceeded {
                allocated: spent,
                budget: scenario.total_budget(),
            });
        }
        let beliefs: Vec<Belief> = priors
            .iter()
            .zip(scenario.sensors())
            .map(|(&g, &s)| Belief::new(g, s))
            .collect();
        let marginals: Vec<(f64, f64)> = priors
            .iter()
            .zip(scenario.sensors())
            .map(|(&g, &s)| signal_marginal(g, s))
            .collect();
        Ok(StageTwo {
            scenario,
            beliefs,
            marginals,
            reactive_budget: (scenario.total_budget() - spent).max(0.0),
        })
    }

    pub(crate) fn reactive_budget(&self) -> f64 {
        self.reactive_budget
    }

    pub(crate) fn marginals(&self) -> &[(f64, f64)] {
        &self.marginals
    }

    pub(crate) fn beliefs(&self) -> &[Belief] {
        &self.beliefs
    }

    pub(crate) fn posteriors_for_bits(&self, bits: &[bool]) -> Vec<f64> {
        self.beliefs
            .iter()
            .zip(bits)
            .map(|(b, &alarm)| b.posterior(alarm))
            .collect()
    }

    fn posteriors_for_index(&self, index: usize) -> Vec<f64> {
        let n = self.beliefs.len();
        self.beliefs
            .iter()
            .enumerate()
            .map(|(i, b)| b.posterior(signal_bit(index, i, n)))
            .collect()
    }

    /// Realized cost after observing the signal with enumeration index `k`.
    fn cost_of_index(&self, index: usize) -> f64 {
        self.cost_of_posteriors(&self.posteriors_for_index(index))
    }

    pub(crate) fn cost_of_bits(&self, bits: &[bool]) -> f64 {
        self.cost_of_posteriors(&self.posteriors_for_bits(bits))
    }

    fn cost_of_posteriors(&self, posteriors: &[f64]) -> f64 {
        let solution = allocate_reactive(posteriors, self.scenario.nodes(), self.reactive_budget)
            .expect("validated posteriors and budget");
        weighted_recovery_cost(posteriors, self.scenario.nodes(), solution.allocations())
    }

    /// `(weight, cost)` of enumeration index `k`.
    fn weighted_cost(&self, index: usize) -> (f64, f64) {
        (
            signal_weight(index, &self.marginals),
            self.cost_of_index(index),
        )
    }
}

/// Belief-weighted recovery cost `sum_i v_i * gamma_i * T_i(x_i)`.
///
/// Zero-belief nodes contribute exactly 0 even when their recovery time is
/// infinite: no expected compromise, no cost.
pub(crate) fn weighted_recovery_cost(
    posteriors: &[f64],
    nodes: &[NodeParams],
    allocations: &[f64],
) -> f64 {
    let mut total = 0.0;
    for ((&g, node), &x) in posteriors.iter().zip(nodes).zip(allocations) {
        if g > 0.0 {
            total += node.valuation() * g * expected_recovery_time(node, x);
        }
    }
    total
}

/// Realized cost of preventive vector `preventive` after observing the
/// signal `bits` (node 0 first, `true` = alarm).
pub fn cost_given_signal(bits: &[bool], preventive: &[f64], scenario: &Scenario) -> Result<f64> {
    let n = scenario.node_count();
    if bits.len() != n {
        return Err(Error::LengthMismatch {
            what: "signal bits",
            expected: n,
            actual: bits.len(),
        });
    }
    let stage = StageTwo::new(preventive, scenario)?;
    Ok(stage.cost_of_bits(bits))
}

/// Exact expected cost by full enumeration of the signal distribution.
///
/// Rejects scenarios above [`EXACT_ENUMERATION_CAP`] nodes. Zero-probability
/// signals contribute nothing (their cost is still reported per signal);
/// any positive-probability signal with infinite cost makes the expectation
/// infinite.
pub fn expected_cost_exact(preventive: &[f64], scenario: &Scenario) -> Result<CostReport> {
    let n = scenario.node_count();
    if n > EXACT_ENUMERATION_CAP {
        return Err(Error::EnumerationCapExceeded {
            nodes: n,
            cap: EXACT_ENUMERATION_CAP,
        });
    }
    let stage = StageTwo::new(preventive, scenario)?;
    let per: Vec<(f64, f64)> = map_indexed(1usize << n, |k| stage.weighted_cost(k));
    let expected = pairwise_weighted(&per);
    let per_signal = per
        .iter()
        .enumerate()
        .map(|(k, &(weight, cost))| {
            (
                SignalVector {
                    bits: (0..n).map(|i| signal_bit(k, i, n)).collect(),
                    weight,
                },
                cost,
            )
        })
        .collect();
    Ok(CostReport {
        expected_cost: expected,
        per_signal: Some(per_signal),
        method: CostMethod::Exact,
        sample_count: 0,
        seed: 0,
    })
}

/// Exact expected cost without assembling the per-signal report.
///
/// Bitwise identical to [`expected_cost_exact`]'s `expected_cost`; this is
/// the hot path for the outer optimizer.
pub fn expected_cost_value(preventive: &[f64], scenario: &Scenario) -> Result<f64> {
    let n = scenario.node_count();
    if n > EXACT_ENUMERATION_CAP {
        return Err(Error::EnumerationCapExceeded {
            nodes: n,
            cap: EXACT_ENUMERATION_CAP,
        });
    }
    let stage = StageTwo::new(preventive, scenario)?;
    let per: Vec<(f64, f64)> = map_indexed(1usize << n, |k| stage.weighted_cost(k));
    Ok(pairwise_weighted(&per))
}

fn pairwise_weighted(per: &[(f64, f64)]) -> f64 {
    // weight 0 contributes exactly 0 even against an infinite cost
    crate::exec::pairwise_sum_by(per, |&(w, c)| if w == 0.0 { 0.0 } else { w * c })
}

/// Expected cost estimated from `samples` i.i.d. signal draws with the given
/// seed. Draw `j` uses substream `j`, so the estimate is independent of
/// execution order.
pub fn expected_cost_sampled(
    preventive: &[f64],
    scenario: &Scenario,
    samples: u64,
    seed: u64,
) -> Result<CostReport> {
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    let stage = StageTwo::new(preventive, scenario)?;
    let n = scenario.node_count();
    let costs: Vec<f64> = map_indexed(samples as usize, |j| {
        let mut rng = stream_rng(seed, j as u64);
        let bits: Vec<bool> = (0..n)
            .map(|i| rng.random::<f64>() < stage.marginals[i].0)
            .collect();
        stage.cost_of_bits(&bits)
    });
    Ok(CostReport {
        expected_cost: pairwise_sum(&costs) / samples as f64,
        per_signal: None,
        method: CostMethod::Sampled,
        sample_count: samples,
        seed,
    })
}

/// Expected cost by the appropriate method for the scenario size: exact up
/// to the enumeration cap, otherwise sampled with
/// [`DEFAULT_SAMPLE_COUNT`] draws.
pub fn expected_cost(preventive: &[f64], scenario: &Scenario, seed: u64) -> Result<CostReport> {
    if scenario.node_count() <= EXACT_ENUMERATION_CAP {
        expected_cost_exact(preventive, scenario)
    } else {
        expected_cost_sampled(preventive, scenario, DEFAULT_SAMPLE_COUNT, seed)
    }
}

/// Scalar expected cost for the optimizer: exact when possible, sampled
/// (fixed seed, so the objective stays deterministic) beyond the cap.
pub(crate) fn objective_value(preventive: &[f64], scenario: &Scenario, seed: u64) -> Result<f64> {
    if scenario.node_count() <= EXACT_ENUMERATION_CAP {
        expected_cost_value(preventive, scenario)
    } else {
        Ok(expected_cost_sampled(preventive, scenario, DEFAULT_SAMPLE_COUNT, seed)?.expected_cost)
    }
}
