//! Time-dependent Rabi envelopes for the two drive schemes.
//!
//! Both protocols use Gaussian envelopes of width σ with the Stokes pulse
//! preceding the pump by the delay τ (counter-intuitive ordering). The
//! fractional scheme adds a pump-synchronous component to the Stokes pulse so
//! that the two envelopes vanish simultaneously with the fixed late-time
//! amplitude ratio tan(α).

use crate::error::ConfigError;
use crate::Real;
use serde::{Deserialize, Serialize};

/// Drive scheme selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    /// Full population transfer: plain counter-intuitive Gaussian pair.
    Stirap,
    /// Fractional transfer: pulses terminate with ratio tan(α), leaving a
    /// coherent superposition weighted by the mixing angle α.
    Fstirap,
}

/// Laser pulse parameters. Times are in the same unit as `sigma`;
/// frequencies in its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulseConfig<T> {
    pub protocol: Protocol,
    /// Peak Rabi frequency Ω0.
    pub omega0: T,
    /// Pulse width σ (the simulation time unit).
    pub sigma: T,
    /// Stokes → pump center offset τ.
    pub delay: T,
    /// Fractional mixing angle α in radians; ignored for [`Protocol::Stirap`].
    pub alpha: T,
    pub t_start: T,
    pub t_end: T,
}

impl<T: Real> Default for PulseConfig<T> {
    fn default() -> Self {
        Self {
            protocol: Protocol::Stirap,
            omega0: T::of(20.0),
            sigma: T::one(),
            delay: T::of(1.5),
            alpha: T::FRAC_PI_4(),
            t_start: T::of(-6.0),
            t_end: T::of(6.0),
        }
    }
}

/// Floor applied to both envelopes so the mixing-angle equations never
/// divide by zero where the pulses vanish.
pub fn envelope_floor<T: Real>(sigma: T) -> T {
    T::of(1e-12) / sigma
}

impl<T: Real> PulseConfig<T> {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let finite = |v: T, f: &'static str| {
            if v.is_finite() { Ok(()) } else { Err(ConfigError::new(f, "must be finite")) }
        };
        finite(self.omega0, "pulse.omega0")?;
        finite(self.sigma, "pulse.sigma")?;
        finite(self.delay, "pulse.delay")?;
        finite(self.alpha, "pulse.alpha")?;
        finite(self.t_start, "pulse.t_start")?;
        finite(self.t_end, "pulse.t_end")?;
        if self.omega0 <= T::zero() {
            return Err(ConfigError::new("pulse.omega0", "must be > 0"));
        }
        if self.sigma <= T::zero() {
            return Err(ConfigError::new("pulse.sigma", "must be > 0"));
        }
        if self.delay <= T::zero() {
            return Err(ConfigError::new("pulse.delay", "must be > 0"));
        }
        if self.t_start >= self.t_end {
            return Err(ConfigError::new("pulse.t_start", "must be < t_end"));
        }
        if self.alpha < T::zero() || self.alpha > T::FRAC_PI_2() {
            return Err(ConfigError::new("pulse.alpha", "must be in [0, pi/2]"));
        }
        Ok(())
    }

    /// Window midpoint; the Stokes peak sits at `t_c - delay/2`, the pump
    /// peak at `t_c + delay/2`.
    pub fn t_center(&self) -> T {
        (self.t_start + self.t_end) / T::of(2.0)
    }

    pub fn floor(&self) -> T {
        envelope_floor(self.sigma)
    }

    /// Envelope pair (Ω_P, Ω_S) at time `t`, clamped at the floor.
    pub fn envelope(&self, t: T) -> Result<(T, T), ConfigError> {
        let ((p, _), (s, _)) = self.envelope_with_derivatives(t)?;
        Ok((p, s))
    }

    /// Envelopes and their analytic time derivatives:
    /// ((Ω_P, Ω̇_P), (Ω_S, Ω̇_S)). A clamped envelope has zero derivative.
    pub fn envelope_with_derivatives(&self, t: T) -> Result<((T, T), (T, T)), ConfigError> {
        if !t.is_finite() {
            return Err(ConfigError::new("t", "must be finite"));
        }
        let tc = self.t_center();
        let half = self.delay / T::of(2.0);
        // Early Gaussian (Stokes center) and late Gaussian (pump center).
        let (ge, dge) = gaussian(t, tc - half, self.sigma);
        let (gl, dgl) = gaussian(t, tc + half, self.sigma);
        let (p, dp, s, ds) = match self.protocol {
            Protocol::Stirap => (
                self.omega0 * gl,
                self.omega0 * dgl,
                self.omega0 * ge,
                self.omega0 * dge,
            ),
            Protocol::Fstirap => {
                let (sa, ca) = (self.alpha.sin(), self.alpha.cos());
                (
                    self.omega0 * sa * gl,
                    self.omega0 * sa * dgl,
                    self.omega0 * (ge + ca * gl),
                    self.omega0 * (dge + ca * dgl),
                )
            }
        };
        let floor = self.floor();
        let clamp = |v: T, dv: T| if v < floor { (floor, T::zero()) } else { (v, dv) };
        Ok((clamp(p, dp), clamp(s, ds)))
    }
}

/// Unit-amplitude Gaussian centered at `t0` and its time derivative.
fn gaussian<T: Real>(t: T, t0: T, sigma: T) -> (T, T) {
    let u = (t - t0) / sigma;
    let g = (-u * u / T::of(2.0)).exp();
    (g, -u / sigma * g)
}
