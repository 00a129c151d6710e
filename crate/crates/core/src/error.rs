use thiserror::Error;

/// Rejected configuration, naming the offending field.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid config: {field}: {reason}")]
pub struct ConfigError {
    pub field: &'static str,
    pub reason: String,
}

impl ConfigError {
    pub fn new(field: &'static str, reason: impl Into<String>) -> Self {
        Self { field, reason: reason.into() }
    }
}

/// Failure raised while integrating the master equation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PropagationError {
    /// Both drive envelopes sat at the floor and no earlier mixing angle was
    /// available to hold.
    #[error("degenerate drive at t = {t}: both envelopes at the floor")]
    DegenerateDrive { t: f64 },

    /// Trace left the unit value beyond tolerance; the step is too large or
    /// the generator is inconsistent.
    #[error("trace drift {drift:e} exceeds 1e-6 at t = {t}")]
    TraceDrift { t: f64, drift: f64 },

    /// A population dropped below the -1e-4 tolerance.
    #[error("population {value:e} below -1e-4 at t = {t}")]
    NegativePopulation { t: f64, value: f64 },

    /// Initial state violated a state-vector invariant.
    #[error("initial state invalid: {0}")]
    InvalidInitialState(String),

    /// Bad propagation options.
    #[error("invalid propagation setup: {0}")]
    InvalidSetup(String),
}
