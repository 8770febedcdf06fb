//! Test-only oracles, independent of the implementation paths they check.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use secalloc_core::model::{expected_recovery_time, NodeParams};

/// One reactive-allocation instance.
pub struct Instance {
    pub nodes: Vec<NodeParams>,
    pub posteriors: Vec<f64>,
    pub budget: f64,
}

/// Frozen random instances: node counts alternate between 2 and 3, the
/// node constants (valuation, half-saturation, pre-existing defense) are
/// drawn from [0.1, 5], posteriors from [0.1, 0.95], budgets from
/// [0.5, 10].
pub fn random_instances(count: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let n = 2 + k % 2;
            let nodes = (0..n)
                .map(|_| {
                    NodeParams::new(
                        1.0,
                        0.1 + 4.9 * rng.random::<f64>(),
                        0.1 + 4.9 * rng.random::<f64>(),
                        0.1 + 4.9 * rng.random::<f64>(),
                    )
                    .unwrap()
                })
                .collect();
            let posteriors = (0..n).map(|_| 0.1 + 0.85 * rng.random::<f64>()).collect();
            let budget = 0.5 + 9.5 * rng.random::<f64>();
            Instance {
                nodes,
                posteriors,
                budget,
            }
        })
        .collect()
}

/// The objective the reactive stage minimizes.
pub fn recovery_cost(posteriors: &[f64], nodes: &[NodeParams], xs: &[f64]) -> f64 {
    posteriors
        .iter()
        .zip(nodes)
        .zip(xs)
        .map(|((&g, nd), &x)| {
            if g == 0.0 {
                0.0
            } else {
                nd.valuation() * g * expected_recovery_time(nd, x)
            }
        })
        .sum()
}

/// Brute-force minimum over an even grid on the budget simplex (two or
/// three nodes, step `budget / steps`).
pub fn grid_minimum(instance: &Instance, steps: usize) -> f64 {
    let n = instance.nodes.len();
    let budget = instance.budget;
    let h = budget / steps as f64;
    // base + sum_i a_i / (delta_i + x_i), with a_i = v_i * g_i * eps_i
    let base: f64 = instance
        .posteriors
        .iter()
        .zip(&instance.nodes)
        .map(|(&g, nd)| nd.valuation() * g)
        .sum();
    let a: Vec<f64> = instance
        .posteriors
        .iter()
        .zip(&instance.nodes)
        .map(|(&g, nd)| nd.valuation() * g * nd.half_saturation())
        .collect();
    let d: Vec<f64> = instance
        .nodes
        .iter()
        .map(|nd| nd.preexisting_defense())
        .collect();

    let mut best = f64::INFINITY;
    match n {
        2 => {
            for i in 0..=steps {
                let x0 = i as f64 * h;
                let cost = a[0] / (d[0] + x0) + a[1] / (d[1] + (budget - x0));
                if cost < best {
                    best = cost;
                }
            }
        }
        3 => {
            for i in 0..=steps {
                let x0 = i as f64 * h;
                let t0 = a[0] / (d[0] + x0);
                for j in 0..=(steps - i) {
                    let x1 = j as f64 * h;
                    let x2 = budget - x0 - x1;
                    let cost = t0 + a[1] / (d[1] + x1) + a[2] / (d[2] + x2);
                    if cost < best {
                        best = cost;
                    }
                }
            }
        }
        _ => unreachable!("instances are two or three nodes"),
    }
    base + best
}
