//! CSV emission. Numbers carry 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::examples::ExampleResult;
use super::{HarnessError, MetricsReport, Run};
use crate::vars::Vars;

pub fn number(v: f64) -> String {
    format!("{v:.16e}")
}

fn header(run: &Run, prefix: &str, extra: &[&str]) -> String {
    let (_, y) = run.solver.coordinates();
    let mut cols = vec!["x".to_string()];
    if y.is_some() {
        cols.push("y".into());
    }
    cols.extend(run.solver.conserved_names().iter().map(|n| format!("{prefix}{n}")));
    cols.extend(extra.iter().map(|n| n.to_string()));
    cols.join(",")
}

fn table(run: &Run, field: &[Vars], prefix: &str, equilibrium: Option<&[Vars]>) -> String {
    let (xs, ys) = run.solver.coordinates();
    let dim = run.solver.model_dim();
    let extra: Vec<&str> = match equilibrium {
        Some(_) => run.solver.equilibrium_names().to_vec(),
        None => Vec::new(),
    };
    let mut out = header(run, prefix, &extra);
    out.push('\n');
    for (i, u) in field.iter().enumerate() {
        let mut row = vec![number(xs[i])];
        if let Some(ys) = &ys {
            row.push(number(ys[i]));
        }
        row.extend((0..dim).map(|c| number(u[c])));
        if let Some(e) = equilibrium {
            row.extend((0..dim).map(|c| number(e[i][c])));
        }
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// One-dimensional: `x, <components>, <equilibrium components>`;
/// two-dimensional long format: `x, y, <components>`.
pub fn solution_csv(run: &Run, equilibrium: Option<&[Vars]>) -> String {
    table(run, &run.state, "", equilibrium)
}

pub fn difference_csv(run: &Run) -> Option<String> {
    run.steady.as_ref().map(|_| table(run, &run.difference(), "d_", None))
}

pub fn steady_csv(run: &Run) -> Option<String> {
    run.steady.as_ref().map(|s| table(run, s, "", None))
}

pub fn metrics_csv(name: &str, m: &MetricsReport) -> String {
    let mut out = String::from(
        "run,component,linf,l1,total_variation,oscillations,steps,runtime_seconds,\
         hyperbolicity_fallbacks,basis_failures,recovery_fallbacks,state_fallbacks\n",
    );
    let d = &m.diagnostics;
    for c in &m.components {
        let _ = writeln!(
            out,
            "{name},{},{},{},{},{},{},{},{},{},{},{}",
            c.name,
            number(c.linf),
            number(c.l1),
            number(c.total_variation),
            c.oscillations,
            m.steps,
            number(m.runtime_seconds),
            d.hyperbolicity_fallbacks,
            d.basis_failures,
            d.recovery_fallbacks,
            d.state_fallbacks
        );
    }
    out
}

fn write(path: PathBuf, text: &str, written: &mut Vec<PathBuf>) -> Result<(), HarnessError> {
    fs::write(&path, text)?;
    written.push(path);
    Ok(())
}

/// Writes `solution.csv`, `difference.csv` (when a steady state exists)
/// and `metrics.csv` into `dir/<run name>/`.
pub fn write_example(dir: &Path, result: &ExampleResult) -> Result<Vec<PathBuf>, HarnessError> {
    let run_dir = dir.join(&result.run.name);
    fs::create_dir_all(&run_dir)?;
    let mut written = Vec::new();
    write(
        run_dir.join("solution.csv"),
        &solution_csv(&result.run, result.equilibrium.as_deref()),
        &mut written,
    )?;
    if let Some(d) = difference_csv(&result.run) {
        write(run_dir.join("difference.csv"), &d, &mut written)?;
    }
    write(
        run_dir.join("metrics.csv"),
        &metrics_csv(&result.run.name, &result.metrics),
        &mut written,
    )?;
    Ok(written)
}

/// Writes the steady field of a run as `dir/<name>-steady.csv`.
pub fn write_steady(dir: &Path, name: &str, run: &Run) -> Result<Option<PathBuf>, HarnessError> {
    let Some(text) = steady_csv(run) else {
        return Ok(None);
    };
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{name}-steady.csv"));
    fs::write(&path, text)?;
    Ok(Some(path))
}
