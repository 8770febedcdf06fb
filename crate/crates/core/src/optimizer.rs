//! First-stage preventive budget optimization.
//!
//! The outer problem — choose `X_P >= 0` with `sum X_P <= X` to minimize the
//! expected cost under optimal reactive response — is nonconvex in general,
//! so it is solved numerically: multi-start projected gradient descent with
//! central finite differences and a backtracking (halving) line search.
//! Because active-set changes in the reactive stage make the objective only
//! piecewise smooth, an iteration whose gradient step stalls falls back to a
//! coordinate-wise search before convergence is declared.
//!
//! Iterates stay feasible exactly: every step is followed by Euclidean
//! projection onto `{x >= 0, sum x <= X}`. Starts are independent and run in
//! parallel; the winner is the deterministic argmin with start-index
//! tie-breaking, so results are bitwise reproducible for any thread count.

use crate::cost::objective_value;
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::model::Scenario;
use crate::rng::{sample_exponential, stream_rng};

/// Substream reserved for drawing random start points.
const RANDOM_START_STREAM: u64 = u64::MAX;

/// Maximum step halvings in the backtracking line search.
const LINE_SEARCH_HALVINGS: usize = 30;

/// Fraction of the budget by which boundary starts are pulled inward when
/// some node has no pre-existing defense (the spending boundary then has
/// infinite cost).
const BOUNDARY_NUDGE: f64 = 1e-6;

/// Tuning knobs of the multi-start descent.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Number of start points (deterministic family first, then seeded
    /// random fills).
    pub starts: usize,
    /// Iteration cap per start.
    pub max_iterations: usize,
    /// Convergence threshold on the relative objective drop per iteration.
    pub convergence_tol: f64,
    /// Finite-difference step as a fraction of the total budget.
    pub fd_step_fraction: f64,
    /// Seed for random starts (and for the sampled cost path on scenarios
    /// above the enumeration cap).
    pub seed: u64,
}

impl OptimizerConfig {
    /// Defaults for an `n`-node scenario. The deterministic start family has
    /// `n + 4` members (all-zero, three uniform splits, `n` one-hots), and
    /// `starts` defaults to exactly that.
    pub fn defaults_for(node_count: usize) -> Self {
        OptimizerConfig {
            starts: node_count + 4,
            max_iterations: 500,
            convergence_tol: 1e-6,
            fd_step_fraction: 1e-4,
            seed: 42,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 {
            return Err(Error::InvalidParameter {
                name: "starts",
                constraint: ">= 1",
                value: 0.0,
            });
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter {
                name: "max_iterations",
                constraint: ">= 1",
                value: 0.0,
            });
        }
        if !(self.convergence_tol.is_finite() && self.convergence_tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "convergence_tol",
                constraint: "finite and > 0",
                value: self.convergence_tol,
            });
        }
        if !(self.fd_step_fraction.is_finite() && self.fd_step_fraction > 0.0) {
            return Err(Error::InvalidParameter {
                name: "fd_step_fraction",
                constraint: "finite and > 0",
                value: self.fd_step_fraction,
            });
        }
        Ok(())
    }
}

/// Best point found by [`optimize_preventive`].
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    /// Preventive allocation; nonnegative, sums to at most the budget.
    pub preventive: Vec<f64>,
    /// Expected cost at `preventive`.
    pub objective: f64,
    /// Descent iterations used by the winning start.
    pub iterations_used: usize,
    /// Which start won (deterministic tie-break: lowest index).
    pub start_index: usize,
}

struct StartOutcome {
    point: Vec<f64>,
    objective: f64,
    iterations: usize,
    history: Vec<f64>,
}

/// Euclidean projection onto `{z >= 0, sum z <= cap}`.
///
/// If clamping negatives already lands inside the budget the clamp is the
/// projection; otherwise the sum constraint is active and the point projects
/// onto the simplex `{z >= 0, sum z = cap}` by the usual sorting rule.
fn project_capped_simplex(point: &[f64], cap: f64) -> Vec<f64> {
    let clamped: Vec<f64> = point.iter().map(|&x| x.max(0.0)).collect();
    if clamped.iter().sum::<f64>() <= cap {
        return clamped;
    }
    let mut sorted = point.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite coordinates"));
    let mut cumulative = 0.0;
    let mut threshold = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - cap) / (j + 1) as f64;
        if u - candidate > 0.0 {
            threshold = candidate;
        }
    }
    point.iter().map(|&x| (x - threshold).max(0.0)).collect()
}

/// Central finite-difference gradient, degrading to one-sided differences at
/// the feasibility boundary and ignoring non-finite probe values.
fn fd_gradient<F>(x: &[f64], f_at_x: f64, step: f64, cap: f64, objective: &F) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let slack = (cap - x.iter().sum::<f64>()).max(0.0);
    let mut gradient = vec![0.0; x.len()];
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        let up = step.min(slack);
        let down = step.min(x[i]);
        let f_up = if up > 0.0 {
            probe[i] = x[i] + up;
            let v = objective(&probe);
            probe[i] = x[i];
            v
        } else {
            f64::NAN
        };
        let f_down = if down > 0.0 {
            probe[i] = x[i] - down;
            let v = objective(&probe);
            probe[i] = x[i];
            v
        } else {
            f64::NAN
        };
        gradient[i] = match (f_up.is_finite(), f_down.is_finite()) {
            (true, true) => (f_up - f_down) / (up + down),
            (true, false) => (f_up - f_at_x) / up,
            (false, true) => (f_at_x - f_down) / down,
            (false, false) => 0.0,
        };
    }
    gradient
}

/// First improving point along the projected negative gradient, halving the
/// step up to [`LINE_SEARCH_HALVINGS`] times.
fn line_search<F>(
    x: &[f64],
    f_at_x: f64,
    gradient: &[f64],
    cap: f64,
    objective: &F,
) -> Option<(Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> f64,
{
    let steepest = gradient.iter().fold(0.0f64, |a, g| a.max(g.abs()));
    if steepest == 0.0 || !steepest.is_finite() {
        return None;
    }
    let mut step = cap / steepest;
    for _ in 0..=LINE_SEARCH_HALVINGS {
        let trial: Vec<f64> = x
            .iter()
            .zip(gradient)
            .map(|(&xi, &gi)| xi - step * gi)
            .collect();
        let candidate = project_capped_simplex(&trial, cap);
        let f_candidate = objective(&candidate);
        if f_candidate < f_at_x {
            return Some((candidate, f_candidate));
        }
        step *= 0.5;
    }
    None
}

/// One greedy pass of single-coordinate moves in both directions, used when
/// the finite-difference direction stalls on a piecewise-smooth ridge.
fn coordinate_sweep<F>(x: &mut Vec<f64>, f_at_x: &mut f64, cap: f64, objective: &F)
where
    F: Fn(&[f64]) -> f64,
{
    for i in 0..x.len() {
        for direction in [1.0, -1.0] {
            let mut step = cap * 0.25;
            for _ in 0..=LINE_SEARCH_HALVINGS {
                let mut trial = x.clone();
                trial[i] += direction * step;
                let candidate = project_capped_simplex(&trial, cap);
                let f_candidate = objective(&candidate);
                if f_candidate < *f_at_x {
                    *x = candidate;
                    *f_at_x = f_candidate;
                    break;
                }
                step *= 0.5;
            }
        }
    }
}

fn descend(scenario: &Scenario, config: &OptimizerConfig, start: Vec<f64>) -> StartOutcome {
    let cap = scenario.total_budget();
    let fd_step = config.fd_step_fraction * cap;
    let objective =
        |x: &[f64]| objective_value(x, scenario, config.seed).expect("feasible iterate");

    let mut x = project_capped_simplex(&start, cap);
    let mut f = objective(&x);
    let mut history = vec![f];
    if !f.is_finite() {
        return StartOutcome {
            point: x,
            objective: f,
            iterations: 0,
            history,
        };
    }

    let mut iterations = 0;
    for _ in 0..config.max_iterations {
        iterations += 1;
        let f_before = f;

        let gradient = fd_gradient(&x, f, fd_step, cap, &objective);
        if let Some((next, f_next)) = line_search(&x, f, &gradient, cap, &objective) {
            x = next;
            f = f_next;
        }
        if f_before - f <= config.convergence_tol * f_before.abs() {
            coordinate_sweep(&mut x, &mut f, cap, &objective);
            history.push(f);
            if f_before - f <= config.convergence_tol * f_before.abs() {
                break;
            }
        } else {
            history.push(f);
        }
    }

    StartOutcome {
        point: x,
        objective: f,
        iterations,
        history,
    }
}

/// Deterministic start family, truncated or padded with seeded random
/// points to `config.starts` entries.
fn start_points(scenario: &Scenario, config: &OptimizerConfig) -> Vec<Vec<f64>> {
    let n = scenario.node_count();
    let cap = scenario.total_budget();

    let mut points: Vec<Vec<f64>> = Vec::with_capacity(config.starts);
    points.push(vec![0.0; n]);
    for t in [0.25, 0.5, 0.75] {
        points.push(vec![t * cap / n as f64; n]);
    }
    for i in 0..n {
        let mut one_hot = vec![0.0; n];
        one_hot[i] = 0.5 * cap;
        points.push(one_hot);
    }
    points.truncate(config.starts);

    if points.len() < config.starts {
        // Uniform on {x >= 0, sum x <= cap}: Dirichlet over n + 1 parts
        // (the extra part is the unspent slack).
        let mut rng = stream_rng(config.seed, RANDOM_START_STREAM);
        while points.len() < config.starts {
            let draws: Vec<f64> = (0..=n).map(|_| sample_exponential(&mut rng, 1.0)).collect();
            let total: f64 = draws.iter().sum();
            points.push(draws[..n].iter().map(|&e| cap * e / total).collect());
        }
    }

    // With delta = 0 somewhere the boundary "spend it all" has infinite
    // cost; pull such starts slightly inside so gradients stay finite.
    if scenario
        .nodes()
        .iter()
        .any(|nd| nd.preexisting_defense() == 0.0)
    {
        let interior = (1.0 - BOUNDARY_NUDGE) * cap;
        for p in &mut points {
            let total: f64 = p.iter().sum();
            if total > interior {
                let shrink = interior / total;
                for xi in p.iter_mut() {
                    *xi *= shrink;
                }
            }
        }
    }

    points
}

/// Minimize the expected cost over preventive allocations.
///
/// Deterministic for a fixed scenario, config and seed: starts descend
/// independently (possibly in parallel) and the best finite outcome wins,
/// ties broken by the lower start index.
pub fn optimize_preventive(scenario: &Scenario, config: &OptimizerConfig) -> Result<Optimum> {
    config.validate()?;
    let starts = start_points(scenario, config);
    let outcomes = map_indexed(starts.len(), |s| {
        descend(scenario, config, starts[s].clone())
    });

    let mut best: Option<(usize, &StartOutcome)> = None;
    for (index, outcome) in outcomes.iter().enumerate() {
        if !outcome.objective.is_finite() {
            continue;
        }
        if best.is_none_or(|(_, b)| outcome.objective < b.objective) {
            best = Some((index, outcome));
        }
    }
    let (start_index, outcome) = best.ok_or(Error::NoFiniteOptimum)?;
    debug_assert!(outcome.history.windows(2).all(|w| w[1] <= w[0]));
    Ok(Optimum {
        preventive: outcome.point.clone(),
        objective: outcome.objective,
        iterations_used: outcome.iterations,
        start_index,
    })
}

/// Minimum total expected cost of the scenario (the optimal objective).
pub fn total_cost(scenario: &Scenario, config: &OptimizerConfig) -> Result<f64> {
    Ok(optimize_preventive(scenario, config)?.objective)
}
