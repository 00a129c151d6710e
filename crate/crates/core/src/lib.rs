//! Adiabatic-basis density-matrix dynamics of a laser-driven three-level
//! Λ system coupled to a phonon bath.
//!
//! The library propagates the 9-component Liouville vector of the density
//! matrix in the instantaneous eigenbasis of the driven system. It provides
//!
//! - Gaussian pulse envelopes for the counter-intuitive full-transfer and
//!   fractional-transfer drive schemes ([`pulse`]),
//! - the analytic three-level eigen-system: mixing angles, their rates,
//!   eigenvalues, and the basis-change matrix ([`frame`]),
//! - the flat-spectrum decay rates and relaxation terms ([`rates`]),
//! - the 9×9 generator and a fixed-step RK4 propagator ([`liouville`]),
//! - an independent brute-force Lindblad superoperator built from the
//!   frequency-resolved jump operators, plus a closed-system Schrödinger
//!   integrator, both used to cross-validate the analytic generator
//!   ([`oracle`]).
//!
//! All numeric code is generic over the scalar type through [`Real`];
//! concrete `f64` aliases are exported at the crate root. Frequencies and
//! rates are in units of 1/σ with σ the pulse width.

pub mod error;
pub mod frame;
pub mod linalg;
pub mod liouville;
pub mod oracle;
pub mod pulse;
pub mod rates;
mod scalar;

pub use error::{ConfigError, PropagationError};
pub use scalar::Real;

/// Default scalar precision for the concrete aliases below.
pub type Scalar = f64;

pub type C64 = num_complex::Complex<f64>;
pub type PulseConfig64 = pulse::PulseConfig<f64>;
pub type SystemConfig64 = rates::SystemConfig<f64>;
pub type FrameState64 = frame::FrameState<f64>;
pub type RateBundle64 = rates::RateBundle<f64>;
pub type AdiabaticStateVector64 = liouville::AdiabaticStateVector<f64>;
pub type TimeSeries64 = liouville::TimeSeries<f64>;
