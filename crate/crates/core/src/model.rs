//! Domain types and closed-form model primitives.
//!
//! A defender protects `n` nodes with a total budget split between
//! *preventive* hardening (spent before the attack) and *reactive* recovery
//! (spent after observing noisy per-node sensors). The primitives here are:
//!
//! ```text
//! compromise prior      gamma = Y / (Y + X_P)            (contest form)
//! signal marginal       P(S=1) = gamma*p + (1-gamma)*q
//! posterior             Bayes update of gamma given S
//! expected recovery     T(X_R) = 1 + eps / (delta + X_R)
//! ```
//!
//! `p` is the sensor's true-positive rate and `q` its false-positive rate.
//! Only the region `p in [1/2, 1], q in [0, 1/2]` is admitted: the diagonal
//! `p = q` is an uninformative sensor and the complementary region is
//! equivalent under signal inversion.
//!
//! All functions are pure; values are freely shareable across threads.

use crate::error::{Error, Result};

/// Largest node count for which the `2^n` signal vectors are enumerated
/// exactly; larger systems must use the sampled cost path.
pub const EXACT_ENUMERATION_CAP: usize = 16;

/// Per-node model constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeParams {
    attack_effort: f64,
    valuation: f64,
    half_saturation: f64,
    preexisting_defense: f64,
}

impl NodeParams {
    /// Validates and builds per-node constants.
    ///
    /// * `attack_effort` — attacker resources aimed at this node (> 0)
    /// * `valuation` — cost per unit time the node spends compromised (> 0)
    /// * `half_saturation` — diminishing-returns constant of recovery (> 0)
    /// * `preexisting_defense` — recovery resources present before any
    ///   reactive spending (>= 0)
    pub fn new(
        attack_effort: f64,
        valuation: f64,
        half_saturation: f64,
        preexisting_defense: f64,
    ) -> Result<Self> {
        require_positive("attack_effort", attack_effort)?;
        require_positive("valuation", valuation)?;
        require_positive("half_saturation", half_saturation)?;
        require_nonnegative("preexisting_defense", preexisting_defense)?;
        Ok(Self {
            attack_effort,
            valuation,
            half_saturation,
            preexisting_defense,
        })
    }

    pub fn attack_effort(&self) -> f64 {
        self.attack_effort
    }

    pub fn valuation(&self) -> f64 {
        self.valuation
    }

    pub fn half_saturation(&self) -> f64 {
        self.half_saturation
    }

    pub fn preexisting_defense(&self) -> f64 {
        self.preexisting_defense
    }
}

/// Binary sensor quality: true-positive and false-positive rates.
///
/// Restricted to `p in [1/2, 1]` and `q in [0, 1/2]`, plus the full
/// diagonal `p = q` (an uninformative sensor at any common rate behaves
/// identically to `p = q = 1/2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorModel {
    true_positive: f64,
    false_positive: f64,
}

impl SensorModel {
    /// The uninformative sensor: alarms on a fair coin flip either way.
    pub const UNINFORMATIVE: SensorModel = SensorModel {
        true_positive: 0.5,
        false_positive: 0.5,
    };

    /// The perfect sensor: alarms exactly when the node is compromised.
    pub const PERFECT: SensorModel = SensorModel {
        true_positive: 1.0,
        false_positive: 0.0,
    };

    pub fn new(true_positive: f64, false_positive: f64) -> Result<Self> {
        let diagonal = true_positive == false_positive && (0.0..=1.0).contains(&true_positive);
        if !diagonal {
            if !(0.5..=1.0).contains(&true_positive) {
                return Err(Error::InvalidParameter {
                    name: "true_positive",
                    constraint: "0.5 <= p <= 1 (or p = q)",
                    value: true_positive,
                });
            }
            if !(0.0..=0.5).contains(&false_positive) {
                return Err(Error::InvalidParameter {
                    name: "false_positive",
                    constraint: "0 <= q <= 0.5 (or p = q)",
                    value: false_positive,
                });
            }
        }
        Ok(Self {
            true_positive,
            false_positive,
        })
    }

    pub fn true_positive(&self) -> f64 {
        self.true_positive
    }

    pub fn false_positive(&self) -> f64 {
        self.false_positive
    }

    /// An uninformative sensor leaves the posterior equal to the prior.
    pub fn is_uninformative(&self) -> bool {
        self.true_positive == self.false_positive
    }
}

/// A full problem instance: nodes, their sensors, and the total budget.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    nodes: Vec<NodeParams>,
    sensors: Vec<SensorModel>,
    total_budget: f64,
}

impl Scenario {
    pub fn new(
        nodes: Vec<NodeParams>,
        sensors: Vec<SensorModel>,
        total_budget: f64,
    ) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::LengthMismatch {
                what: "scenario nodes",
                expected: 1,
                actual: 0,
            });
        }
        if sensors.len() != nodes.len() {
            return Err(Error::LengthMismatch {
                what: "scenario sensors",
                expected: nodes.len(),
                actual: sensors.len(),
            });
        }
        require_positive("total_budget", total_budget)?;
        Ok(Self {
            nodes,
            sensors,
            total_budget,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[NodeParams] {
        &self.nodes
    }

    pub fn sensors(&self) -> &[SensorModel] {
        &self.sensors
    }

    pub fn total_budget(&self) -> f64 {
        self.total_budget
    }

    /// Copy of this scenario with the same sensor at every node.
    pub fn with_sensors_broadcast(&self, sensor: SensorModel) -> Scenario {
        Scenario {
            nodes: self.nodes.clone(),
            sensors: vec![sensor; self.nodes.len()],
            total_budget: self.total_budget,
        }
    }
}

/// One realization of the `n` binary sensor outputs with its probability
/// weight under the joint signal distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalVector {
    /// Per-node signals; `true` means the sensor alarmed.
    pub bits: Vec<bool>,
    /// Probability of this realization.
    pub weight: f64,
}

impl SignalVector {
    /// Signals rendered as a bit string, node 0 first, e.g. `"0110"`.
    pub fn bit_string(&self) -> String {
        self.bits
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }
}

/// A node's compromise belief before and after observing its sensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Belief {
    pub prior: f64,
    pub posterior_given_alarm: f64,
    pub posterior_given_clear: f64,
}

impl Belief {
    pub fn new(prior: f64, sensor: SensorModel) -> Belief {
        Belief {
            prior,
            posterior_given_alarm: posterior(prior, sensor, true),
            posterior_given_clear: posterior(prior, sensor, false),
        }
    }

    pub fn posterior(&self, alarm: bool) -> f64 {
        if alarm {
            self.posterior_given_alarm
        } else {
            self.posterior_given_clear
        }
    }
}

/// Probability that a node is compromised given the attack effort aimed at
/// it and the preventive resources spent hardening it.
///
/// Contest form `Y / (Y + X_P)`: equals 1 with no prevention and decreases
/// strictly toward 0 as `X_P` grows.
pub fn compromise_prior(attack_effort: f64, preventive: f64) -> Result<f64> {
    if !(attack_effort.is_finite() && attack_effort > 0.0) {
        return Err(Error::InvalidParameter {
            name: "attack_effort",
            constraint: "finite and > 0",
            value: attack_effort,
        });
    }
    if !(preventive.is_finite() && preventive >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "preventive",
            constraint: "finite and >= 0",
            value: preventive,
        });
    }
    Ok(attack_effort / (attack_effort + preventive))
}

/// Marginal signal distribution `(P(alarm), P(clear))` for a node with
/// compromise prior `prior`.
///
/// `P(alarm) = gamma*p + (1-gamma)*q`; the clear probability is returned as
/// the exact complement so the pair always sums to 1.
pub fn signal_marginal(prior: f64, sensor: SensorModel) -> (f64, f64) {
    debug_assert!((0.0..=1.0).contains(&prior));
    let alarm = prior * sensor.true_positive + (1.0 - prior) * sensor.false_positive;
    (alarm, 1.0 - alarm)
}

/// Bayes posterior of compromise given one signal, with a flag marking
/// zero-probability signals.
///
/// When the observed signal has zero marginal probability the posterior is
/// defined as 0 and the flag is set; such signals carry zero weight in every
/// expectation, so the convention never influences results.
pub fn posterior_with_flag(prior: f64, sensor: SensorModel, alarm: bool) -> (f64, bool) {
    debug_assert!((0.0..=1.0).contains(&prior));
    // p = q is exactly uninformative: the likelihood factors cancel and the
    // posterior is the prior. Short-circuiting keeps that identity bitwise.
    if sensor.is_uninformative() {
        return (prior, false);
    }
    let (like_compromised, like_safe) = if alarm {
        (sensor.true_positive, sensor.false_positive)
    } else {
        (1.0 - sensor.true_positive, 1.0 - sensor.false_positive)
    };
    let numerator = like_compromised * prior;
    let denominator = numerator + like_safe * (1.0 - prior);
    if denominator == 0.0 {
        return (0.0, true);
    }
    (numerator / denominator, false)
}

/// Bayes posterior of compromise given one signal (0 for zero-probability
/// signals; see [`posterior_with_flag`]).
pub fn posterior(prior: f64, sensor: SensorModel, alarm: bool) -> f64 {
    posterior_with_flag(prior, sensor, alarm).0
}

/// Recovery rate of a compromised node given its reactive allocation:
/// `(X_R + delta) / (X_R + delta + eps)`.
pub fn recovery_rate(node: &NodeParams, reactive: f64) -> f64 {
    debug_assert!(reactive >= 0.0);
    let resources = node.preexisting_defense + reactive;
    resources / (resources + node.half_saturation)
}

/// Expected time to recover a compromised node: `1 + eps / (delta + X_R)`.
///
/// Returns `+inf` when the node has no recovery resources at all
/// (`delta + X_R = 0`); this is a legal extended-real value that every
/// downstream sum propagates.
pub fn expected_recovery_time(node: &NodeParams, reactive: f64) -> f64 {
    debug_assert!(reactive >= 0.0);
    let resources = node.preexisting_defense + reactive;
    if resources == 0.0 {
        return f64::INFINITY;
    }
    1.0 + node.half_saturation / resources
}

/// Extracts bit `i` (node `i`'s signal) of enumeration index `k` under the
/// lexicographic order: node 0 is the most significant bit.
#[inline]
pub(crate) fn signal_bit(index: usize, node: usize, n: usize) -> bool {
    (index >> (n - 1 - node)) & 1 == 1
}

/// Joint probability of enumeration index `k` as the product of per-node
/// marginal factors, multiplied in node order.
pub(crate) fn signal_weight(index: usize, marginals: &[(f64, f64)]) -> f64 {
    let n = marginals.len();
    let mut weight = 1.0;
    for (node, &(alarm, clear)) in marginals.iter().enumerate() {
        weight *= if signal_bit(index, node, n) {
            alarm
        } else {
            clear
        };
    }
    weight
}

/// All `2^n` signal vectors in lexicographic order with their joint
/// probabilities (independent sensors).
///
/// Rejects `n` above [`EXACT_ENUMERATION_CAP`]; large systems must use the
/// sampled cost path instead.
pub fn enumerate_signals(priors: &[f64], sensors: &[SensorModel]) -> Result<Vec<SignalVector>> {
    let n = priors.len();
    if n == 0 {
        return Err(Error::LengthMismatch {
            what: "signal priors",
            expected: 1,
            actual: 0,
        });
    }
    if sensors.len() != n {
        return Err(Error::LengthMismatch {
            what: "sensors",
            expected: n,
            actual: sensors.len(),
        });
    }
    if n > EXACT_ENUMERATION_CAP {
        return Err(Error::EnumerationCapExceeded {
            nodes: n,
            cap: EXACT_ENUMERATION_CAP,
        });
    }
    let marginals: Vec<(f64, f64)> = priors
        .iter()
        .zip(sensors)
        .map(|(&g, &s)| signal_marginal(g, s))
        .collect();
    let vectors = (0..1usize << n)
        .map(|k| SignalVector {
            bits: (0..n).map(|i| signal_bit(k, i, n)).collect(),
            weight: signal_weight(k, &marginals),
        })
        .collect();
    Ok(vectors)
}

/// `count` i.i.d. draws from the joint signal law, one substream per draw.
///
/// Unlike [`enumerate_signals`] this has no node cap; each returned vector
/// carries its joint probability as the weight. Draws may repeat.
pub fn sample_signals(
    priors: &[f64],
    sensors: &[SensorModel],
    count: usize,
    seed: u64,
) -> Result<Vec<SignalVector>> {
    use rand::Rng;
    let n = priors.len();
    if n == 0 {
        return Err(Error::LengthMismatch {
            what: "signal priors",
            expected: 1,
            actual: 0,
        });
    }
    if sensors.len() != n {
        return Err(Error::LengthMismatch {
            what: "sensors",
            expected: n,
            actual: sensors.len(),
        });
    }
    let marginals: Vec<(f64, f64)> = priors
        .iter()
        .zip(sensors)
        .map(|(&g, &s)| signal_marginal(g, s))
        .collect();
    let draws = (0..count)
        .map(|j| {
            let mut rng = crate::rng::stream_rng(seed, j as u64);
            let bits: Vec<bool> = marginals
                .iter()
                .map(|&(alarm, _)| rng.random::<f64>() < alarm)
                .collect();
            let weight = bits
                .iter()
                .zip(&marginals)
                .map(|(&b, &(alarm, clear))| if b { alarm } else { clear })
                .product();
            SignalVector { bits, weight }
        })
        .collect();
    Ok(draws)
}

fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            constraint: "finite and > 0",
            value,
        })
    }
}

fn require_nonnegative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            constraint: "finite and >= 0",
            value,
        })
    }
}
