//! Acceptance suite: one test per criterion, each printing a pass line with
//! its timing. Run with `cargo test -p secalloc-cli --test acceptance --
//! --nocapture` to see the lines.

mod oracles;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use secalloc_cli::config::{default_scenario, linspace};
use secalloc_core::mc::simulate;
use secalloc_core::metrics::{gamma_improvement, improvement};
use secalloc_core::model::{posterior, signal_marginal, NodeParams, Scenario, SensorModel};
use secalloc_core::optimizer::{optimize_preventive, OptimizerConfig};
use secalloc_core::reactive::allocate_reactive;

const ORACLE_SEED: u64 = 0x5eca110c;

fn secalloc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_secalloc"))
}

fn run_to(args: &[&str], config: Option<&Path>, out: &Path) {
    let mut cmd = secalloc();
    cmd.args(args);
    if let Some(cfg) = config {
        cmd.arg("--config").arg(cfg);
    }
    cmd.arg("--out").arg(out);
    let status = cmd.status().expect("spawn secalloc");
    assert!(status.success(), "{args:?} failed");
}

/// Parse one named column of a simple numeric CSV.
fn csv_columns(text: &str, names: &[&str]) -> Vec<Vec<f64>> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().expect("header").split(',').collect();
    let idx: Vec<usize> = names
        .iter()
        .map(|n| header.iter().position(|h| h == n).expect("column"))
        .collect();
    let mut cols = vec![Vec::new(); names.len()];
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        for (slot, &i) in idx.iter().enumerate() {
            cols[slot].push(fields[i].parse::<f64>().expect("numeric field"));
        }
    }
    cols
}

#[test]
fn criterion_1_allocator_matches_brute_force() {
    let started = Instant::now();
    let instances = oracles::random_instances(100, ORACLE_SEED);
    let mut worst: f64 = 0.0;
    for (k, inst) in instances.iter().enumerate() {
        let solution = allocate_reactive(&inst.posteriors, &inst.nodes, inst.budget).unwrap();
        let closed_form =
            oracles::recovery_cost(&inst.posteriors, &inst.nodes, solution.allocations());
        let grid = oracles::grid_minimum(inst, 2000);
        let relative = (closed_form - grid).abs() / grid;
        assert!(
            relative <= 1e-3,
            "instance {k}: closed form {closed_form} vs grid {grid} (rel {relative:.2e})"
        );
        worst = worst.max(relative);
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() <= 60, "took {elapsed:.1?}, limit 60 s");
    println!(
        "[criterion 1] PASS ({elapsed:.1?}) 100 instances within 1e-3 of the grid oracle (worst {worst:.2e})"
    );
}

#[test]
fn criterion_2_kkt_and_budget_on_oracle_instances() {
    let instances = oracles::random_instances(100, ORACLE_SEED);
    for (k, inst) in instances.iter().enumerate() {
        let solution = allocate_reactive(&inst.posteriors, &inst.nodes, inst.budget).unwrap();
        let spent: f64 = solution.allocations().iter().sum();
        assert!(
            (spent - inst.budget).abs() <= 1e-9,
            "instance {k}: spent {spent} of {}",
            inst.budget
        );
        let marginals: Vec<f64> = solution
            .active_set()
            .iter()
            .map(|&i| {
                let held = inst.nodes[i].preexisting_defense() + solution.allocations()[i];
                inst.nodes[i].valuation() * inst.posteriors[i] * inst.nodes[i].half_saturation()
                    / (held * held)
            })
            .collect();
        for pair in marginals.windows(2) {
            assert!(
                (pair[0] - pair[1]).abs() <= 1e-6 * pair[0].abs(),
                "instance {k}: KKT marginals differ: {pair:?}"
            );
        }
    }
    println!("[criterion 2] PASS budget to 1e-9 and KKT stationarity to 1e-6 on all 100 instances");
}

#[test]
fn criterion_3_posterior_tower_property_grid() {
    let mut worst: f64 = 0.0;
    for p in linspace(0.5, 1.0, 50) {
        for q in linspace(0.0, 0.5, 50) {
            let sensor = SensorModel::new(p, q).unwrap();
            for gamma in linspace(0.0, 1.0, 20) {
                let (alarm, clear) = signal_marginal(gamma, sensor);
                let recomposed = alarm * posterior(gamma, sensor, true)
                    + clear * posterior(gamma, sensor, false);
                let gap = (recomposed - gamma).abs();
                assert!(
                    gap <= 1e-12,
                    "tower gap {gap:.2e} at p={p} q={q} gamma={gamma}"
                );
                worst = worst.max(gap);
            }
        }
    }
    println!(
        "[criterion 3] PASS tower property within 1e-12 on the 50x50x20 grid (worst {worst:.1e})"
    );
}

#[test]
fn criterion_4_zero_improvement_on_the_diagonal() {
    let scenario = default_scenario();
    let config = OptimizerConfig::defaults_for(scenario.node_count());
    for k in 0..=5 {
        let p = 0.5 + 0.1 * k as f64;
        let point = improvement(&scenario, p, p, &config).unwrap();
        assert!(
            point.improvement.abs() <= 1e-9,
            "I({p},{p}) = {}",
            point.improvement
        );
        assert!(point.cost_baseline > 0.0);
    }
    println!("[criterion 4] PASS I(p,p) = 0 within 1e-9 for p in {{0.5,...,1.0}}");
}

#[test]
fn criterion_5_preventive_spending_monotone_in_sensor_quality() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let slack = 1e-3 * 10.0;

    // fig3 CSV via the CLI on the default grids
    let fig3 = dir.path().join("fig3.csv");
    run_to(&["fig3", "--seed", "42"], None, &fig3);
    let text = std::fs::read_to_string(&fig3).unwrap();
    let cols = csv_columns(&text, &["p", "q_fixed", "sum_XP"]);
    let (ps, qs, sums) = (&cols[0], &cols[1], &cols[2]);
    for series in [0.0, 0.25, 0.5] {
        let xs: Vec<f64> = (0..ps.len())
            .filter(|&i| qs[i] == series)
            .map(|i| sums[i])
            .collect();
        assert_eq!(xs.len(), 11);
        for w in xs.windows(2) {
            assert!(
                w[1] >= w[0] - slack,
                "fig3 series q={series}: sum_XP fell from {} to {}",
                w[0],
                w[1]
            );
        }
    }

    // fig4 CSV via the CLI
    let fig4 = dir.path().join("fig4.csv");
    run_to(&["fig4", "--seed", "42"], None, &fig4);
    let text = std::fs::read_to_string(&fig4).unwrap();
    let cols = csv_columns(&text, &["q", "p_fixed", "sum_XP"]);
    let (qs, ps, sums) = (&cols[0], &cols[1], &cols[2]);
    for series in [0.5, 0.75, 1.0] {
        let xs: Vec<f64> = (0..qs.len())
            .filter(|&i| ps[i] == series)
            .map(|i| sums[i])
            .collect();
        assert_eq!(xs.len(), 11);
        for w in xs.windows(2) {
            assert!(
                w[1] <= w[0] + slack,
                "fig4 series p={series}: sum_XP rose from {} to {}",
                w[0],
                w[1]
            );
        }
    }

    // total preventive spending over the full sensor grid peaks at (1, 0)
    let scenario = default_scenario();
    let config = OptimizerConfig::defaults_for(2);
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    let mut at_perfect = f64::NAN;
    for p in linspace(0.5, 1.0, 11) {
        for q in linspace(0.0, 0.5, 11) {
            let sensor = SensorModel::new(p, q).unwrap();
            let optimum =
                optimize_preventive(&scenario.with_sensors_broadcast(sensor), &config).unwrap();
            let total: f64 = optimum.preventive.iter().sum();
            if total > best.0 {
                best = (total, p, q);
            }
            if p == 1.0 && q == 0.0 {
                at_perfect = total;
            }
        }
    }
    assert!(
        (best.1, best.2) == (1.0, 0.0),
        "grid argmax of total prevention at ({}, {}) = {}, not (1, 0) = {at_perfect}",
        best.1,
        best.2,
        best.0
    );

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() <= 600, "took {elapsed:.1?}, limit 10 min");
    println!(
        "[criterion 5] PASS ({elapsed:.1?}) fig3 nondecreasing, fig4 nonincreasing, grid max at (1,0) = {at_perfect:.3}"
    );
}

#[test]
fn criterion_6_improvement_monotone_along_the_edges() {
    let scenario = default_scenario();
    let config = OptimizerConfig::defaults_for(scenario.node_count());
    let slack = 1e-4;

    let along_p: Vec<f64> = linspace(0.5, 1.0, 11)
        .into_iter()
        .map(|p| improvement(&scenario, p, 0.0, &config).unwrap().improvement)
        .collect();
    for w in along_p.windows(2) {
        assert!(
            w[1] >= w[0] - slack,
            "I(p, 0) fell from {} to {}",
            w[0],
            w[1]
        );
    }

    let along_q: Vec<f64> = linspace(0.0, 0.5, 11)
        .into_iter()
        .map(|q| improvement(&scenario, 1.0, q, &config).unwrap().improvement)
        .collect();
    for w in along_q.windows(2) {
        assert!(
            w[1] <= w[0] + slack,
            "I(1, q) rose from {} to {}",
            w[0],
            w[1]
        );
    }
    println!(
        "[criterion 6] PASS I(p,0) nondecreasing ({:.4} -> {:.4}), I(1,q) nonincreasing ({:.4} -> {:.4})",
        along_p[0],
        along_p[10],
        along_q[0],
        along_q[10]
    );
}

#[test]
fn criterion_7_fixed_belief_improvement_shape() {
    let nodes = vec![NodeParams::new(1.0, 1.0, 1.0, 0.0).unwrap(); 2];
    let grid: Vec<f64> = (1..100).map(|k| k as f64 / 100.0).collect();
    for &gamma2 in &[0.25, 0.5, 0.75] {
        let values: Vec<f64> = grid
            .iter()
            .map(|&g1| {
                gamma_improvement(&[g1, gamma2], &nodes, 2.0)
                    .unwrap()
                    .improvement
            })
            .collect();
        let peaks: Vec<usize> = (1..values.len() - 1)
            .filter(|&i| values[i] > values[i - 1] && values[i] > values[i + 1])
            .collect();
        assert_eq!(
            peaks.len(),
            1,
            "gamma2 = {gamma2}: expected one interior maximum, found {peaks:?}"
        );
        let at = grid[peaks[0]];
        assert!(
            (0.02..=0.3).contains(&at),
            "gamma2 = {gamma2}: peak at gamma1 = {at}"
        );
    }
    let spot = gamma_improvement(&[0.5, 0.5], &nodes, 2.0)
        .unwrap()
        .improvement;
    assert!((spot - 0.125).abs() <= 1e-9, "I2(0.5, 0.5) = {spot}");
    println!(
        "[criterion 7] PASS unique interior peaks in [0.02, 0.3]; I2(0.5,0.5) = 0.125 within 1e-9"
    );
}

#[test]
fn criterion_8_monte_carlo_convergence() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(ORACLE_SEED ^ 0x3c);
    let mut worst_cost = 0.0f64;
    let mut worst_freq = 0.0f64;
    for case in 0..10 {
        let n = 1 + case % 4;
        let nodes: Vec<NodeParams> = (0..n)
            .map(|_| {
                NodeParams::new(
                    0.5 + 2.5 * rng.random::<f64>(),
                    0.5 + 1.5 * rng.random::<f64>(),
                    0.3 + 1.2 * rng.random::<f64>(),
                    0.05 + 0.95 * rng.random::<f64>(),
                )
                .unwrap()
            })
            .collect();
        let sensors: Vec<SensorModel> = (0..n)
            .map(|_| {
                SensorModel::new(0.6 + 0.4 * rng.random::<f64>(), 0.4 * rng.random::<f64>())
                    .unwrap()
            })
            .collect();
        let budget = n as f64 * (2.0 + 4.0 * rng.random::<f64>());
        // keep at least 20% of the budget reactive so the cost is finite
        let preventive: Vec<f64> = (0..n)
            .map(|_| rng.random::<f64>() * 0.8 * budget / n as f64)
            .collect();
        let scenario = Scenario::new(nodes, sensors, budget).unwrap();
        let report = simulate(&scenario, &preventive, 1_000_000, 1000 + case as u64).unwrap();
        assert!(
            report.relative_error <= 0.01,
            "case {case}: relative error {}",
            report.relative_error
        );
        assert!(
            report.signal_frequency_error <= 0.005,
            "case {case}: frequency error {}",
            report.signal_frequency_error
        );
        worst_cost = worst_cost.max(report.relative_error);
        worst_freq = worst_freq.max(report.signal_frequency_error);
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() <= 300, "took {elapsed:.1?}, limit 5 min");
    println!(
        "[criterion 8] PASS ({elapsed:.1?}) 10 scenarios at 1e6 episodes: worst cost error {worst_cost:.2e}, worst frequency error {worst_freq:.2e}"
    );
}

#[test]
fn criterion_9_every_subcommand_reruns_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let write_cfg = |name: &str, body: &str| -> PathBuf {
        let path = dir.path().join(name);
        std::fs::write(&path, body).unwrap();
        path
    };
    let configs = [
        (
            "fig3",
            Some(write_cfg(
                "fig3.toml",
                "seed = 7\n[sweep]\np_values = [0.5, 0.8, 1.0]\nq_fixed = [0.0, 0.5]\n",
            )),
        ),
        (
            "fig4",
            Some(write_cfg(
                "fig4.toml",
                "seed = 7\n[sweep]\nq_values = [0.0, 0.3, 0.5]\np_fixed = [0.5, 1.0]\n",
            )),
        ),
        (
            "fig5",
            Some(write_cfg(
                "fig5.toml",
                "seed = 7\n[sweep]\np_values = [0.5, 1.0]\nq_values = [0.0, 0.5]\n",
            )),
        ),
        (
            "fig6",
            Some(write_cfg(
                "fig6.toml",
                "seed = 7\n[sweep]\ngamma1_values = [0.1, 0.5, 0.9]\ngamma2_fixed = [0.5]\nreactive_budget = 2.0\n",
            )),
        ),
        ("optimize", None),
        (
            "validate",
            Some(write_cfg(
                "validate.toml",
                "seed = 7\n[validate]\nepisodes = 20000\npreventive_fractions = [0.0, 0.5]\n",
            )),
        ),
    ];
    for (subcommand, config) in &configs {
        let a = dir.path().join(format!("{subcommand}_a.csv"));
        let b = dir.path().join(format!("{subcommand}_b.csv"));
        run_to(&[subcommand, "--seed", "7"], config.as_deref(), &a);
        run_to(&[subcommand, "--seed", "7"], config.as_deref(), &b);
        let bytes_a = std::fs::read(&a).unwrap();
        let bytes_b = std::fs::read(&b).unwrap();
        assert_eq!(bytes_a, bytes_b, "{subcommand} reruns differ");
        assert!(!bytes_a.is_empty());
    }
    println!("[criterion 9] PASS all six subcommands rerun byte-identically");
}
