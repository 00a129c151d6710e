use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;
use stirap_core::liouville::PropagateOptions;
use stirap_core::{PulseConfig64, SystemConfig64};

/// One simulation run: drive, bath, and integration settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub pulse: PulseConfig64,
    pub system: SystemConfig64,
    pub run: PropagateOptions<f64>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.pulse.validate()?;
        self.system.validate()?;
        Ok(())
    }
}

/// Which quantity the sweep varies; everything else comes from the base
/// config.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    GammaFlat,
    CouplingSq,
    NBar,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::GammaFlat => "gamma_flat",
            SweepAxis::CouplingSq => "coupling_sq",
            SweepAxis::NBar => "n_bar",
        }
    }
}

/// Output groups recorded into `finals.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableGroup {
    BarePops,
    BareCohs,
    AdiabaticPops,
    /// Final values only: suppresses per-run time-series files.
    FinalsOnly,
}

fn default_observables() -> Vec<ObservableGroup> {
    vec![
        ObservableGroup::BarePops,
        ObservableGroup::BareCohs,
        ObservableGroup::AdiabaticPops,
    ]
}

/// Batch of runs over one axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    #[serde(default = "default_observables")]
    pub observables: Vec<ObservableGroup>,
    /// Write a time-series CSV for every run in addition to the finals.
    #[serde(default)]
    pub timeseries: bool,
    #[serde(default)]
    pub pulse: PulseConfig64,
    #[serde(default)]
    pub system: SystemConfig64,
    #[serde(default)]
    pub run: PropagateOptions<f64>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.pulse.validate()?;
        self.system.validate()?;
        if self.values.is_empty() {
            bail!("invalid config: sweep.values: must be non-empty");
        }
        for pair in self.values.windows(2) {
            if pair[1] <= pair[0] {
                bail!("invalid config: sweep.values: must be strictly increasing");
            }
        }
        if self.values[0] < 0.0 {
            bail!("invalid config: sweep.values: must be non-negative");
        }
        // The swept strength knob must not collide with a fixed one.
        match self.axis {
            SweepAxis::GammaFlat if self.system.coupling_sq > 0.0 => {
                bail!("invalid config: system.coupling_sq: must be 0 when sweeping gamma_flat")
            }
            SweepAxis::CouplingSq if self.system.gamma_flat > 0.0 => {
                bail!("invalid config: system.gamma_flat: must be 0 when sweeping coupling_sq")
            }
            _ => {}
        }
        if self.observables.is_empty() {
            bail!("invalid config: sweep.observables: must select at least one group");
        }
        Ok(())
    }

    /// Base config with the axis value applied.
    pub fn run_config(&self, value: f64) -> RunConfig {
        let mut system = self.system;
        match self.axis {
            SweepAxis::GammaFlat => system.gamma_flat = value,
            SweepAxis::CouplingSq => system.coupling_sq = value,
            SweepAxis::NBar => system.n_bar = value,
        }
        RunConfig { pulse: self.pulse, system, run: self.run }
    }

    pub fn wants(&self, group: ObservableGroup) -> bool {
        self.observables.contains(&group)
    }
}

fn parse<T: serde::de::DeserializeOwned>(text: &str, path: &Path) -> Result<T> {
    let looks_like_json = text.trim_start().starts_with('{');
    if looks_like_json {
        serde_json::from_str(text)
            .with_context(|| format!("failed to parse {} as JSON", path.display()))
    } else {
        toml::from_str(text)
            .with_context(|| format!("failed to parse {} as TOML", path.display()))
    }
}

pub fn load_run_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let cfg: RunConfig = parse(&text, path)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_sweep_config(path: &Path) -> Result<SweepConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let cfg: SweepConfig = parse(&text, path)?;
    cfg.validate()?;
    Ok(cfg)
}
