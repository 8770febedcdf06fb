use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use secalloc_cli::config::{
    load_config, resolve_common, resolve_fig3, resolve_fig4, resolve_fig5, resolve_fig6,
    resolve_validate, CliError,
};
use secalloc_cli::csv;
use secalloc_cli::sweeps;

/// Two-stage security budget allocation: sweeps, optimization and
/// simulation-based validation, emitted as plot-ready CSV.
#[derive(Parser)]
#[command(name = "secalloc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Total preventive spending vs true-positive rate, per fixed q
    Fig3(RunArgs),
    /// Total preventive spending vs false-positive rate, per fixed p
    Fig4(RunArgs),
    /// Improvement over uninformative sensors across the (p, q) grid
    Fig5(RunArgs),
    /// Fixed-belief improvement vs the first node's compromise prior
    Fig6(RunArgs),
    /// Solve one scenario and tabulate the reactive policy per signal
    Optimize(RunArgs),
    /// Monte Carlo validation of the analytic expected cost
    Validate(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment configuration; built-in defaults when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path (default: <subcommand>.csv, or the config's
    /// output_path)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed override (wins over the config file)
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 keeps the library default
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Also write a companion plotting-hints text file
    #[arg(long)]
    hints: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (name, args): (&str, &RunArgs) = match &cli.command {
        Command::Fig3(a) => ("fig3", a),
        Command::Fig4(a) => ("fig4", a),
        Command::Fig5(a) => ("fig5", a),
        Command::Fig6(a) => ("fig6", a),
        Command::Optimize(a) => ("optimize", a),
        Command::Validate(a) => ("validate", a),
    };

    if args.threads > 0 {
        // Results are thread-count independent; this only bounds parallelism.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build_global();
    }

    let raw = load_config(args.config.as_deref())?;
    let resolved = resolve_common(&raw, args.seed)?;
    let out = args
        .out
        .clone()
        .or(resolved.output_path.clone())
        .unwrap_or_else(|| PathBuf::from(format!("{name}.csv")));

    let rows_written = match &cli.command {
        Command::Fig3(_) => {
            let spec = resolve_fig3(&raw)?;
            let rows = sweeps::run_fig3(&resolved.scenario, &resolved.optimizer, &spec)?;
            let count = csv::write_fig3(&out, &rows)?;
            if args.hints {
                csv::write_hints(
                    &out,
                    &[
                        "x: p (true-positive rate)",
                        "y: sum_XP (total preventive allocation)",
                        "series: q_fixed",
                        "secondary: J_star (optimal expected cost)",
                    ],
                )?;
            }
            count
        }
        Command::Fig4(_) => {
            let spec = resolve_fig4(&raw)?;
            let rows = sweeps::run_fig4(&resolved.scenario, &resolved.optimizer, &spec)?;
            let count = csv::write_fig4(&out, &rows)?;
            if args.hints {
                csv::write_hints(
                    &out,
                    &[
                        "x: q (false-positive rate)",
                        "y: sum_XP (total preventive allocation)",
                        "series: p_fixed",
                        "secondary: J_star (optimal expected cost)",
                    ],
                )?;
            }
            count
        }
        Command::Fig5(_) => {
            let spec = resolve_fig5(&raw)?;
            let rows = sweeps::run_fig5(&resolved.scenario, &resolved.optimizer, &spec)?;
            let count = csv::write_fig5(&out, &rows)?;
            if args.hints {
                csv::write_hints(
                    &out,
                    &[
                        "x: p, y: q (heatmap over the sensor region)",
                        "z: improvement (fraction of baseline cost saved)",
                    ],
                )?;
            }
            count
        }
        Command::Fig6(_) => {
            let spec = resolve_fig6(&raw)?;
            let rows = sweeps::run_fig6(&spec)?;
            let count = csv::write_fig6(&out, &rows)?;
            if args.hints {
                csv::write_hints(
                    &out,
                    &[
                        "x: gamma1 (first node's compromise prior)",
                        "y: improvement (perfect sensing vs prior-only)",
                        "series: gamma2_fixed",
                    ],
                )?;
            }
            count
        }
        Command::Optimize(_) => {
            let report = sweeps::run_optimize(&resolved.scenario, &resolved.optimizer)?;
            eprintln!(
                "optimum from start {} after {} iterations; objective {:.6}",
                report.optimum.start_index,
                report.optimum.iterations_used,
                report.optimum.objective
            );
            let count = csv::write_optimize(&out, &report.rows)?;
            if args.hints {
                csv::write_hints(
                    &out,
                    &[
                        "records: objective | preventive (per node) | reactive (per signal, node)",
                        "signal: sensor bit string, node 0 first",
                    ],
                )?;
            }
            count
        }
        Command::Validate(_) => {
            let spec = resolve_validate(&raw)?;
            let rows = sweeps::run_validate(&resolved.scenario, &spec, resolved.seed)?;
            for row in &rows {
                if !row.ok {
                    eprintln!(
                        "validation point {} (fraction {}) outside the 1% bound",
                        row.point, row.fraction
                    );
                }
            }
            let count = csv::write_validate(&out, &rows)?;
            if args.hints {
                csv::write_hints(
                    &out,
                    &[
                        "rows: one simulation per preventive fraction",
                        "ok: 1 when the empirical mean is within 1% of the analytic cost",
                    ],
                )?;
            }
            count
        }
    };

    eprintln!("wrote {rows_written} rows to {}", out.display());
    Ok(())
}
