//! CSV writers and the plain-text summary table.
//!
//! Floats are written with the shortest decimal form that parses back to the
//! same `f64`, so every CSV round-trips exactly.

use std::fmt::Write as _;
use std::io;

use super::reference::published;
use super::{CycleDriftResult, DtSweepResult, ExperimentResult, RMSE_COMPONENTS};

/// Long format: one row per (mode, seed, component).
pub fn write_rmse_long_csv<W: io::Write>(result: &ExperimentResult, writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["mode", "seed", "component", "rmse"])?;
    for trial in &result.trials {
        for (name, value) in RMSE_COMPONENTS.iter().zip(trial.report.components()) {
            w.write_record([trial.mode.as_str(), &trial.seed.to_string(), name, &value.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Table layout: one row per component, one mean column per mode, then one
/// standard-error column per mode.
pub fn write_summary_csv<W: io::Write>(result: &ExperimentResult, writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["component".to_string()];
    header.extend(result.summaries.iter().map(|s| s.mode.to_string()));
    header.extend(result.summaries.iter().map(|s| format!("{}_std_error", s.mode)));
    w.write_record(&header)?;
    for (c, name) in RMSE_COMPONENTS.iter().enumerate() {
        let mut row = vec![name.to_string()];
        row.extend(result.summaries.iter().map(|s| s.mean.components()[c].to_string()));
        row.extend(result.summaries.iter().map(|s| s.std_error[c].to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_cycle_curve_csv<W: io::Write>(result: &CycleDriftResult, writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "mode",
        "cycle",
        "target_error_mean",
        "target_error_std_error",
        "estimate_error_mean",
        "estimate_error_std_error",
        "trials",
    ])?;
    for curve in &result.curves {
        for p in &curve.points {
            w.write_record([
                curve.mode.to_string(),
                p.cycle.to_string(),
                p.target_mean.to_string(),
                p.target_std_error.to_string(),
                p.estimate_mean.to_string(),
                p.estimate_std_error.to_string(),
                curve.trials_used.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_cycle_trials_csv<W: io::Write>(result: &CycleDriftResult, writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["mode", "seed", "cycle", "target_error", "estimate_error"])?;
    for trial in &result.trials {
        for (i, r) in trial.returns.iter().enumerate() {
            w.write_record([
                trial.mode.to_string(),
                trial.seed.to_string(),
                (i + 1).to_string(),
                r.to_target.to_string(),
                r.to_estimate.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_dt_curve_csv<W: io::Write>(result: &DtSweepResult, writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["filter_dt", "mean_xy_rmse", "std_error", "trials", "censored"])?;
    for p in &result.points {
        w.write_record([
            p.filter_dt.to_string(),
            p.mean_xy_rmse.to_string(),
            p.std_error.to_string(),
            p.trials.to_string(),
            p.censored.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_dt_trials_csv<W: io::Write>(result: &DtSweepResult, writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["filter_dt", "seed", "xy_rmse", "censored"])?;
    for t in &result.trials {
        w.write_record([
            t.filter_dt.to_string(),
            t.seed.to_string(),
            t.xy_rmse.to_string(),
            t.censored.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Human-readable table of mean ± standard error per mode, with the
/// published value in brackets where one exists.
pub fn format_summary_table(result: &ExperimentResult) -> String {
    const W: usize = 30;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} experiment: {} trials per mode, values are mean ± std error [published]",
        result.name,
        result.seeds.len()
    );
    let _ = write!(out, "{:<10}", "component");
    for s in &result.summaries {
        let _ = write!(out, "{:>W$}", format!("{} (n={})", s.mode, s.trials_used));
    }
    out.push('\n');
    for (c, name) in RMSE_COMPONENTS.iter().enumerate() {
        let _ = write!(out, "{name:<10}");
        for s in &result.summaries {
            let mut cell = format!("{:.4} ± {:.4}", s.mean.components()[c], s.std_error[c]);
            if let Some(p) = published(result.name, s.mode, name) {
                let _ = write!(cell, " [{p:.4}]");
            }
            let _ = write!(out, "{cell:>W$}");
        }
        out.push('\n');
    }
    for warning in &result.warnings {
        let _ = writeln!(out, "warning: {warning}");
    }
    out
}
