use crate::config::{ObservableGroup, SweepConfig};
use crate::output;
use crate::run::{simulate, FinalValues, RunRecord};
use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;
use stirap_core::pulse::Protocol;
use stirap_core::TimeSeries64;

/// Aggregated result of one sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub records: Vec<RunRecord>,
    pub summary: SweepSummary,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSummary {
    pub axis: String,
    pub n_runs: usize,
    pub n_failed: usize,
    /// Exponential fit of the final target population against the axis
    /// over the strictly decreasing prefix, present for full-transfer
    /// sweeps over a coupling-strength axis. Saturation near the
    /// equilibrated tail degrades this fit; see `initial_decade_fit` for
    /// the clean decay constant.
    pub transfer_decay_fit: Option<LogLinearFit>,
    /// Same fit restricted to the first decade of rho22 - 1/3.
    pub initial_decade_fit: Option<LogLinearFit>,
}

/// Least-squares line through (x, ln y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points_used: usize,
    /// −slope: the e-folding constant of the decay.
    pub decay_constant: f64,
}

/// Fit ln(y) = intercept + slope·x by least squares. Requires positive
/// samples and at least three points.
pub fn fit_log_linear(points: &[(f64, f64)]) -> Option<LogLinearFit> {
    let filtered: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, y)| *y > 0.0)
        .map(|&(x, y)| (x, y.ln()))
        .collect();
    let n = filtered.len();
    if n < 3 {
        return None;
    }
    let nf = n as f64;
    let sx: f64 = filtered.iter().map(|p| p.0).sum();
    let sy: f64 = filtered.iter().map(|p| p.1).sum();
    let sxx: f64 = filtered.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = filtered.iter().map(|p| p.0 * p.1).sum();
    let denom = nf * sxx - sx * sx;
    if denom == 0.0 {
        return None;
    }
    let slope = (nf * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / nf;
    let mean_y = sy / nf;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (x, ly) in &filtered {
        let pred = intercept + slope * x;
        ss_res += (ly - pred) * (ly - pred);
        ss_tot += (ly - mean_y) * (ly - mean_y);
    }
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Some(LogLinearFit { slope, intercept, r_squared, points_used: n, decay_constant: -slope })
}

/// Longest strictly decreasing prefix of `ys` (with a small slack for
/// numeric noise), as indices.
pub fn strictly_decreasing_prefix(ys: &[f64], slack: f64) -> usize {
    let mut n = 1;
    while n < ys.len() && ys[n] < ys[n - 1] + slack {
        n += 1;
    }
    n
}

fn execute_runs(sweep: &SweepConfig, keep_series: bool) -> Vec<(RunRecord, Option<TimeSeries64>)> {
    sweep
        .values
        .par_iter()
        .enumerate()
        .map(|(index, &value)| {
            let config = sweep.run_config(value);
            let started = std::time::Instant::now();
            let (finals, diagnostics, series, error) = match simulate(&config) {
                Ok(series) => (
                    Some(FinalValues::from_series(&series)),
                    Some(series.diagnostics),
                    keep_series.then_some(series),
                    None,
                ),
                Err(e) => (None, None, None, Some(e.to_string())),
            };
            let record = RunRecord {
                index,
                axis: Some(sweep.axis.name().to_string()),
                axis_value: Some(value),
                config,
                finals,
                diagnostics,
                error,
                wall_time_s: started.elapsed().as_secs_f64(),
            };
            (record, series)
        })
        .collect()
}

/// Execute every run of the sweep on the current rayon pool. Individual
/// failures are recorded, not fatal.
pub fn execute(sweep: &SweepConfig) -> Result<SweepOutcome> {
    sweep.validate()?;
    let records: Vec<RunRecord> = execute_runs(sweep, false).into_iter().map(|(r, _)| r).collect();
    let n_failed = records.iter().filter(|r| r.error.is_some()).count();
    let (transfer_decay_fit, initial_decade_fit) = fit_transfer_decay(sweep, &records);
    Ok(SweepOutcome {
        summary: SweepSummary {
            axis: sweep.axis.name().to_string(),
            n_runs: records.len(),
            n_failed,
            transfer_decay_fit,
            initial_decade_fit,
        },
        records,
    })
}

/// ln(ρ22 − ⅓) against the coupling axis for the full-transfer protocol:
/// once over the strictly decreasing prefix of the finals, once restricted
/// to the initial decade of ρ22 − ⅓.
fn fit_transfer_decay(
    sweep: &SweepConfig,
    records: &[RunRecord],
) -> (Option<LogLinearFit>, Option<LogLinearFit>) {
    if sweep.pulse.protocol != Protocol::Stirap
        || matches!(sweep.axis, crate::config::SweepAxis::NBar)
    {
        return (None, None);
    }
    let mut points = Vec::new();
    for r in records {
        let (Some(value), Some(f)) = (r.axis_value, r.finals.as_ref()) else {
            return (None, None);
        };
        points.push((value, f.bare_pops[2]));
    }
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let prefix = strictly_decreasing_prefix(&ys, 1e-6);
    let shifted: Vec<(f64, f64)> = points[..prefix]
        .iter()
        .map(|&(x, y)| (x, y - 1.0 / 3.0))
        .collect();
    let decade: Vec<(f64, f64)> = shifted
        .iter()
        .copied()
        .take_while(|&(_, y)| y >= shifted[0].1 / 10.0)
        .collect();
    (fit_log_linear(&shifted), fit_log_linear(&decade))
}

/// Run the sweep and write `finals.csv`, `diagnostics.json`, and
/// `summary.json` (and per-run time-series files when requested).
pub fn execute_to_dir(sweep: &SweepConfig, out_dir: &Path) -> Result<SweepOutcome> {
    sweep.validate()?;
    let write_series = sweep.timeseries && !sweep.wants(ObservableGroup::FinalsOnly);
    let runs = execute_runs(sweep, write_series);
    let mut records = Vec::with_capacity(runs.len());
    for (record, series) in runs {
        if let Some(series) = series {
            output::write_timeseries_csv(
                &out_dir.join(format!("timeseries_run{:03}.csv", record.index)),
                &series,
            )?;
        }
        records.push(record);
    }
    let n_failed = records.iter().filter(|r| r.error.is_some()).count();
    let (transfer_decay_fit, initial_decade_fit) = fit_transfer_decay(sweep, &records);
    let outcome = SweepOutcome {
        summary: SweepSummary {
            axis: sweep.axis.name().to_string(),
            n_runs: records.len(),
            n_failed,
            transfer_decay_fit,
            initial_decade_fit,
        },
        records,
    };
    let mut rows: Vec<(f64, &str, f64)> = Vec::new();
    for r in &outcome.records {
        let (Some(value), Some(f)) = (r.axis_value, r.finals.as_ref()) else {
            continue;
        };
        if sweep.wants(ObservableGroup::BarePops) || sweep.wants(ObservableGroup::FinalsOnly) {
            rows.push((value, "rho00", f.bare_pops[0]));
            rows.push((value, "rho11", f.bare_pops[1]));
            rows.push((value, "rho22", f.bare_pops[2]));
        }
        if sweep.wants(ObservableGroup::BareCohs) || sweep.wants(ObservableGroup::FinalsOnly) {
            for (name, [re, im]) in ["01", "12", "02"].iter().zip(f.bare_cohs.iter()) {
                rows.push((value, coh_name("re", name), *re));
                rows.push((value, coh_name("im", name), *im));
            }
        }
        if sweep.wants(ObservableGroup::AdiabaticPops) || sweep.wants(ObservableGroup::FinalsOnly)
        {
            rows.push((value, "pop_plus", f.adiabatic_pops[0]));
            rows.push((value, "pop_zero", f.adiabatic_pops[1]));
            rows.push((value, "pop_minus", f.adiabatic_pops[2]));
        }
    }
    output::write_finals_csv(&out_dir.join("finals.csv"), &rows)?;
    output::write_json(&out_dir.join("diagnostics.json"), &outcome.records)?;
    output::write_json(&out_dir.join("summary.json"), &outcome.summary)?;
    if outcome.summary.n_failed > 0 {
        bail!("{} of {} runs failed", outcome.summary.n_failed, outcome.summary.n_runs);
    }
    Ok(outcome)
}

fn coh_name(part: &str, pair: &str) -> &'static str {
    match (part, pair) {
        ("re", "01") => "re01",
        ("im", "01") => "im01",
        ("re", "12") => "re12",
        ("im", "12") => "im12",
        ("re", "02") => "re02",
        ("im", "02") => "im02",
        _ => unreachable!(),
    }
}

/// Build a rayon pool with the requested worker count (0 = rayon default).
pub fn worker_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("building worker pool")
}
