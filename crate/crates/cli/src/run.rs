use crate::config::RunConfig;
use crate::output;
use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;
use stirap_core::frame::FrameState;
use stirap_core::liouville::{propagate, Diagnostics};
use stirap_core::{AdiabaticStateVector64, TimeSeries64};

/// Final-row observables of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinalValues {
    pub bare_pops: [f64; 3],
    /// (ρ_01, ρ_12, ρ_02) as (re, im) pairs.
    pub bare_cohs: [[f64; 2]; 3],
    pub adiabatic_pops: [f64; 3],
}

impl FinalValues {
    pub fn from_series(series: &TimeSeries64) -> Self {
        let cohs = series.final_bare_cohs();
        Self {
            bare_pops: series.final_bare_pops(),
            bare_cohs: [
                [cohs[0].re, cohs[0].im],
                [cohs[1].re, cohs[1].im],
                [cohs[2].re, cohs[2].im],
            ],
            adiabatic_pops: *series.adiabatic_pops.last().expect("non-empty series"),
        }
    }
}

/// Everything needed to reproduce and interpret one run: the resolved
/// config snapshot, the final observables, and the integration diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub index: usize,
    pub axis: Option<String>,
    pub axis_value: Option<f64>,
    pub config: RunConfig,
    pub finals: Option<FinalValues>,
    pub diagnostics: Option<Diagnostics>,
    pub error: Option<String>,
    pub wall_time_s: f64,
}

/// Propagate the bare ground state through the configured window.
pub fn simulate(config: &RunConfig) -> Result<TimeSeries64> {
    config.validate()?;
    let frame0 = FrameState::at(&config.pulse, config.pulse.t_start, config.system.delta, None)
        .context("drive is degenerate at the window start")?;
    let rho0 = AdiabaticStateVector64::initial_ground_state(&frame0);
    let series = propagate(&config.pulse, &config.system, &rho0, &config.run)?;
    Ok(series)
}

/// `simulate` subcommand: one run, one CSV, one diagnostics sidecar.
pub fn simulate_to_dir(config: &RunConfig, name: &str, out_dir: &Path) -> Result<RunRecord> {
    let started = std::time::Instant::now();
    let series = simulate(config)?;
    let record = RunRecord {
        index: 0,
        axis: None,
        axis_value: None,
        config: config.clone(),
        finals: Some(FinalValues::from_series(&series)),
        diagnostics: Some(series.diagnostics),
        error: None,
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    output::write_timeseries_csv(&out_dir.join(format!("timeseries_{name}.csv")), &series)?;
    output::write_json(&out_dir.join("diagnostics.json"), &record)?;
    Ok(record)
}
