//! CSV emission: fixed schemas, full-precision floats, LF endings.

use std::io::Write;
use std::path::Path;

use crate::config::CliError;
use crate::sweeps::{Fig3Row, Fig4Row, Fig5Row, Fig6Row, OptimizeRow, ValidateRow};

/// Scientific notation with 17 significant digits: enough to round-trip any
/// double, and a fixed width so reruns are byte-identical.
pub fn float_field(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_rows(
    path: &Path,
    header: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<usize, CliError> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    let mut count = 0;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        out.push_str(&row.join(","));
        out.push('\n');
        count += 1;
    }
    let mut file = std::fs::File::create(path)
        .map_err(|e| CliError::Io(format!("creating {}: {e}", path.display())))?;
    file.write_all(out.as_bytes())
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
    Ok(count)
}

pub fn write_fig3(path: &Path, rows: &[Fig3Row]) -> Result<usize, CliError> {
    write_rows(
        path,
        &["p", "q_fixed", "sum_XP", "J_star"],
        rows.iter().map(|r| {
            vec![
                float_field(r.p),
                float_field(r.q_fixed),
                float_field(r.sum_preventive),
                float_field(r.optimal_cost),
            ]
        }),
    )
}

pub fn write_fig4(path: &Path, rows: &[Fig4Row]) -> Result<usize, CliError> {
    write_rows(
        path,
        &["q", "p_fixed", "sum_XP", "J_star"],
        rows.iter().map(|r| {
            vec![
                float_field(r.q),
                float_field(r.p_fixed),
                float_field(r.sum_preventive),
                float_field(r.optimal_cost),
            ]
        }),
    )
}

pub fn write_fig5(path: &Path, rows: &[Fig5Row]) -> Result<usize, CliError> {
    write_rows(
        path,
        &["p", "q", "improvement"],
        rows.iter().map(|r| {
            vec![
                float_field(r.p),
                float_field(r.q),
                float_field(r.improvement),
            ]
        }),
    )
}

pub fn write_fig6(path: &Path, rows: &[Fig6Row]) -> Result<usize, CliError> {
    write_rows(
        path,
        &["gamma1", "gamma2_fixed", "improvement"],
        rows.iter().map(|r| {
            vec![
                float_field(r.gamma1),
                float_field(r.gamma2_fixed),
                float_field(r.improvement),
            ]
        }),
    )
}

pub fn write_optimize(path: &Path, rows: &[OptimizeRow]) -> Result<usize, CliError> {
    write_rows(
        path,
        &["record", "signal", "node", "value"],
        rows.iter().map(|r| match r {
            OptimizeRow::Objective(value) => vec![
                "objective".into(),
                String::new(),
                String::new(),
                float_field(*value),
            ],
            OptimizeRow::Preventive { node, value } => vec![
                "preventive".into(),
                String::new(),
                node.to_string(),
                float_field(*value),
            ],
            OptimizeRow::Reactive {
                signal,
                node,
                value,
            } => vec![
                "reactive".into(),
                signal.clone(),
                node.to_string(),
                float_field(*value),
            ],
        }),
    )
}

pub fn write_validate(path: &Path, rows: &[ValidateRow]) -> Result<usize, CliError> {
    write_rows(
        path,
        &[
            "point",
            "fraction",
            "episodes",
            "empirical_cost",
            "analytic_cost",
            "relative_error",
            "signal_frequency_error",
            "seed",
            "ok",
        ],
        rows.iter().map(|r| {
            vec![
                r.point.to_string(),
                float_field(r.fraction),
                r.report.episodes.to_string(),
                float_field(r.report.empirical_cost),
                float_field(r.report.analytic_cost),
                float_field(r.report.relative_error),
                float_field(r.report.signal_frequency_error),
                r.report.seed.to_string(),
                if r.ok { "1".into() } else { "0".into() },
            ]
        }),
    )
}

/// Companion plotting hints, written next to the CSV on request.
pub fn write_hints(csv_path: &Path, lines: &[&str]) -> Result<(), CliError> {
    let mut path = csv_path.as_os_str().to_owned();
    path.push(".hints.txt");
    let text = lines.join("\n") + "\n";
    std::fs::write(&path, text)
        .map_err(|e| CliError::Io(format!("writing hints next to {}: {e}", csv_path.display())))
}
