//! CSV and JSON writers for run reports.
//!
//! | file                  | columns                                                                |
//! |-----------------------|------------------------------------------------------------------------|
//! | `metrics.csv`         | drop, scheme, eta, d2d_pairs, macrotier_users, picotier_users, d2d_mode_users, jain, sum_utility, coverage_<ρ>... |
//! | `convergence.csv`     | drop, iteration, G, I, max_price_residual, eta, d2d_pairs             |
//! | `rates.csv`           | drop, scheme, receiver_role, rate_bps, eta, d2d_pairs, receiver        |
//! | `coverage_vs_eta.csv` | eta, scheme, rho, mean, stderr                                         |
//! | `d2d_counts.csv`      | d2d_pairs, scheme, d2d_mode_users, d2d_rx_on_bs, d2d_rx_on_tx (means)   |
//! | `report.json`         | config, seeds, per-drop rows, aggregates                               |

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{HarnessError, Result};
use crate::experiment::RunReport;

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(HarnessError::io(path))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn num(v: f64) -> String {
    format!("{v}")
}

pub fn write_metrics_csv(report: &RunReport, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header: Vec<String> = [
        "drop",
        "scheme",
        "eta",
        "d2d_pairs",
        "macrotier_users",
        "picotier_users",
        "d2d_mode_users",
        "jain",
        "sum_utility",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend(report.config.target_rates.iter().map(|r| format!("coverage_{r}")));
    w.write_record(&header)?;
    for row in &report.rows {
        let mut rec = vec![
            row.drop.to_string(),
            row.scheme.to_string(),
            num(row.eta),
            row.d2d_pairs.to_string(),
            row.tier_loads.macrotier.to_string(),
            row.tier_loads.picotier.to_string(),
            row.tier_loads.d2d_mode.to_string(),
            num(row.jain),
            num(row.sum_utility),
        ];
        rec.extend(row.coverage.iter().map(|c| num(c.1)));
        w.write_record(&rec)?;
    }
    w.flush().map_err(HarnessError::io(path))?;
    Ok(())
}

pub fn write_convergence_csv(report: &RunReport, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["drop", "iteration", "G", "I", "max_price_residual", "eta", "d2d_pairs"])?;
    for result in &report.results {
        for rec in result.trace.iter().flatten() {
            w.write_record([
                result.seeds.drop.to_string(),
                rec.iteration.to_string(),
                num(rec.sum_utility),
                num(rec.dual_value),
                num(rec.max_price_residual),
                num(result.eta),
                result.d2d_pairs.to_string(),
            ])?;
        }
    }
    w.flush().map_err(HarnessError::io(path))?;
    Ok(())
}

pub fn write_rates_csv(report: &RunReport, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["drop", "scheme", "receiver_role", "rate_bps", "eta", "d2d_pairs", "receiver"])?;
    for result in &report.results {
        for outcome in &result.outcomes {
            for s in &outcome.metrics.effective_rates {
                w.write_record([
                    result.seeds.drop.to_string(),
                    outcome.scheme.to_string(),
                    s.role.as_str().to_string(),
                    num(s.rate_bps),
                    num(result.eta),
                    result.d2d_pairs.to_string(),
                    s.receiver.to_string(),
                ])?;
            }
        }
    }
    w.flush().map_err(HarnessError::io(path))?;
    Ok(())
}

pub fn write_coverage_vs_eta_csv(report: &RunReport, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["eta", "scheme", "rho", "mean", "stderr"])?;
    for agg in &report.aggregates {
        for (rho, c) in &agg.coverage {
            w.write_record([num(agg.eta), agg.scheme.to_string(), num(*rho), num(c.mean), num(c.stderr)])?;
        }
    }
    w.flush().map_err(HarnessError::io(path))?;
    Ok(())
}

pub fn write_d2d_counts_csv(report: &RunReport, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["d2d_pairs", "scheme", "d2d_mode_users", "d2d_rx_on_bs", "d2d_rx_on_tx"])?;
    for agg in &report.aggregates {
        w.write_record([
            agg.d2d_pairs.to_string(),
            agg.scheme.to_string(),
            num(agg.d2d_mode_users.mean),
            num(agg.d2d_rx_on_bs.mean),
            num(agg.d2d_rx_on_tx.mean),
        ])?;
    }
    w.flush().map_err(HarnessError::io(path))?;
    Ok(())
}

pub fn write_report_json(report: &RunReport, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(HarnessError::io(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, report)?;
    w.write_all(b"\n").map_err(HarnessError::io(path))?;
    w.flush().map_err(HarnessError::io(path))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    Run,
    EtaSweep,
    D2dSweep,
}

/// Writes every file for `kind` into `dir` and returns the paths written.
pub fn write_all(report: &RunReport, dir: &Path, kind: ReportKind) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(HarnessError::io(dir))?;
    let mut written = Vec::new();
    let mut emit = |name: &str, f: fn(&RunReport, &Path) -> Result<()>| -> Result<()> {
        let path = dir.join(name);
        f(report, &path)?;
        written.push(path);
        Ok(())
    };
    emit("metrics.csv", write_metrics_csv)?;
    emit("convergence.csv", write_convergence_csv)?;
    emit("rates.csv", write_rates_csv)?;
    match kind {
        ReportKind::Run => {}
        ReportKind::EtaSweep => emit("coverage_vs_eta.csv", write_coverage_vs_eta_csv)?,
        ReportKind::D2dSweep => emit("d2d_counts.csv", write_d2d_counts_csv)?,
    }
    emit("report.json", write_report_json)?;
    Ok(written)
}
