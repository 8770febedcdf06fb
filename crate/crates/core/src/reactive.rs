//! Closed-form reactive budget allocation.
//!
//! Given posterior compromise beliefs, the second-stage problem
//!
//! ```text
//! minimize   sum_i v_i * gamma_i * (1 + eps_i / (delta_i + x_i))
//! subject to sum_i x_i = X_R,  x_i >= 0
//! ```
//!
//! is convex and has a water-filling solution: with `w_i = sqrt(v_i *
//! gamma_i * eps_i)`, the active nodes receive `x_i = t * w_i - delta_i`
//! where the common scale `t = (X_R + sum_A delta_k) / sum_A w_k` spends the
//! budget exactly. The active set is resolved by iterative removal: start
//! from every node with `w_i > 0`, drop all nodes whose unclipped share is
//! negative, and recompute until none are. The scale shrinks strictly at
//! each removal round, so dropped nodes stay dropped and the fixed point
//! satisfies the KKT conditions of the full problem.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::NodeParams;

/// Result of the reactive stage for one signal realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ReactiveSolution {
    allocations: Vec<f64>,
    active_set: BTreeSet<usize>,
    lagrange_scale: f64,
    unspent: f64,
}

impl ReactiveSolution {
    /// Per-node reactive budget; zero outside the active set.
    pub fn allocations(&self) -> &[f64] {
        &self.allocations
    }

    /// Indices of actively recovered nodes.
    pub fn active_set(&self) -> &BTreeSet<usize> {
        &self.active_set
    }

    /// Common proportionality factor `t` of the active nodes
    /// (`delta_i + x_i = t * w_i`); 0 when the active set is empty.
    pub fn lagrange_scale(&self) -> f64 {
        self.lagrange_scale
    }

    /// Budget left unallocated. Nonzero only in the degenerate case where
    /// every posterior is zero and spending cannot reduce the (identically
    /// zero) objective.
    pub fn unspent(&self) -> f64 {
        self.unspent
    }

    fn all_zero(n: usize, unspent: f64) -> Self {
        ReactiveSolution {
            allocations: vec![0.0; n],
            active_set: BTreeSet::new(),
            lagrange_scale: 0.0,
            unspent,
        }
    }
}

/// Optimal reactive allocation of `reactive_budget` given per-node
/// posteriors.
///
/// Nodes with zero posterior (or zero valuation weight) receive nothing.
/// When every posterior is zero the objective is identically zero and the
/// all-zero allocation is returned with the budget recorded as unspent.
pub fn allocate_reactive(
    posteriors: &[f64],
    nodes: &[NodeParams],
    reactive_budget: f64,
) -> Result<ReactiveSolution> {
    let n = nodes.len();
    if posteriors.len() != n {
        return Err(Error::LengthMismatch {
            what: "posteriors",
            expected: n,
            actual: posteriors.len(),
        });
    }
    for &g in posteriors {
        if !(g.is_finite() && (0.0..=1.0).contains(&g)) {
            return Err(Error::InvalidParameter {
                name: "posterior",
                constraint: "in [0, 1]",
                value: g,
            });
        }
    }
    if !(reactive_budget.is_finite() && reactive_budget >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "reactive_budget",
            constraint: "finite and >= 0",
            value: reactive_budget,
        });
    }

    if reactive_budget == 0.0 {
        return Ok(ReactiveSolution::all_zero(n, 0.0));
    }

    // w_i = sqrt(v_i * gamma_i * eps_i); zero-weight nodes never recover.
    let weights: Vec<f64> = nodes
        .iter()
        .zip(posteriors)
        .map(|(nd, &g)| (nd.valuation() * g * nd.half_saturation()).sqrt())
        .collect();
    let mut active: Vec<bool> = weights.iter().map(|&w| w > 0.0).collect();
    if !active.iter().any(|&a| a) {
        return Ok(ReactiveSolution::all_zero(n, reactive_budget));
    }

    loop {
        let mut weight_sum = 0.0;
        let mut defense_sum = 0.0;
        for i in 0..n {
            if active[i] {
                weight_sum += weights[i];
                defense_sum += nodes[i].preexisting_defense();
            }
        }
        let scale = (reactive_budget + defense_sum) / weight_sum;

        let mut removed = false;
        for i in 0..n {
            if active[i] && scale * weights[i] - nodes[i].preexisting_defense() < 0.0 {
                active[i] = false;
                removed = true;
            }
        }
        if removed {
            continue;
        }

        let mut allocations = vec![0.0; n];
        let mut active_set = BTreeSet::new();
        for i in 0..n {
            if active[i] {
                allocations[i] = scale * weights[i] - nodes[i].preexisting_defense();
                active_set.insert(i);
            }
        }
        return Ok(ReactiveSolution {
            allocations,
            active_set,
            lagrange_scale: scale,
            unspent: 0.0,
        });
    }
}
