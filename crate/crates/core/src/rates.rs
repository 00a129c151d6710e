//! Flat-spectrum decay rates and relaxation terms.
//!
//! The bath enters through two one-phonon channels per driven transition
//! (labelled `a` for 0↔1 and `b` for 1↔2) evaluated at shifted frequencies:
//! emission rates γ^{++}(ω) = Γ_eff·(1+N̄) are valid where ω − ω_j > 0 and
//! absorption rates γ^{−−}(ω) = Γ_eff·N̄ where ω + ω_j < 0, with ω_a, ω_b the
//! (negative) transition offsets. Outside its validity window a rate is zero,
//! not an error. The occupation N̄ is a frequency-independent temperature
//! proxy and the spectral density is flat.
//!
//! From these, seven channel rates γ1…γ7 are assembled at the frame's Bohr
//! frequencies with trigonometric weights:
//!
//! - γ1: |a_+⟩ → |a_0⟩, γ2: |a_−⟩ → |a_0⟩,
//! - γ3: |a_+⟩ → |a_−⟩, γ4: |a_−⟩ → |a_+⟩,
//! - γ5: pure dephasing on the ± pair,
//! - γ6: |a_0⟩ → |a_−⟩, γ7: |a_0⟩ → |a_+⟩ (absorption only; vanish at N̄=0).

use crate::error::ConfigError;
use crate::frame::FrameState;
use crate::linalg::{cre, C};
use crate::Real;
use serde::{Deserialize, Serialize};

/// Bath and level-structure parameters. Frequencies and rates in 1/σ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig<T> {
    /// Single-photon detuning Δ.
    pub delta: T,
    /// Flat spectral density value Γ.
    pub gamma_flat: T,
    /// Bath occupation N̄ (temperature proxy).
    pub n_bar: T,
    /// Coupling ratio (λ/ω_ph)²; alternative strength knob, scaled by 1/σ.
    pub coupling_sq: T,
    /// Transition offset ω_a = ω_0 − ω_1 + Δ (< 0).
    pub omega_a: T,
    /// Transition offset ω_b = ω_2 − ω_1 + Δ (< 0).
    pub omega_b: T,
    /// Scale Γ_eff by (Ω(t)/Ω0)² during propagation (exploratory option).
    pub pulse_scaled_coupling: bool,
}

impl<T: Real> Default for SystemConfig<T> {
    fn default() -> Self {
        Self {
            delta: T::one(),
            gamma_flat: T::zero(),
            n_bar: T::zero(),
            coupling_sq: T::zero(),
            omega_a: T::of(-100.0),
            omega_b: T::of(-100.0),
            pulse_scaled_coupling: false,
        }
    }
}

impl<T: Real> SystemConfig<T> {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let finite = |v: T, f: &'static str| {
            if v.is_finite() { Ok(()) } else { Err(ConfigError::new(f, "must be finite")) }
        };
        finite(self.delta, "system.delta")?;
        finite(self.gamma_flat, "system.gamma_flat")?;
        finite(self.n_bar, "system.n_bar")?;
        finite(self.coupling_sq, "system.coupling_sq")?;
        finite(self.omega_a, "system.omega_a")?;
        finite(self.omega_b, "system.omega_b")?;
        if self.gamma_flat < T::zero() {
            return Err(ConfigError::new("system.gamma_flat", "must be >= 0"));
        }
        if self.n_bar < T::zero() {
            return Err(ConfigError::new("system.n_bar", "must be >= 0"));
        }
        if self.coupling_sq < T::zero() {
            return Err(ConfigError::new("system.coupling_sq", "must be >= 0"));
        }
        if self.omega_a >= T::zero() {
            return Err(ConfigError::new("system.omega_a", "must be < 0"));
        }
        if self.omega_b >= T::zero() {
            return Err(ConfigError::new("system.omega_b", "must be < 0"));
        }
        if self.gamma_flat > T::zero() && self.coupling_sq > T::zero() {
            return Err(ConfigError::new(
                "system.coupling_sq",
                "gamma_flat and coupling_sq are alternative strength knobs; set only one",
            ));
        }
        Ok(())
    }

    /// Effective flat rate: whichever strength knob is in use.
    pub fn gamma_eff(&self) -> T {
        self.gamma_flat + self.coupling_sq
    }

    fn offset(&self, branch: Branch) -> T {
        match branch {
            Branch::A => self.omega_a,
            Branch::B => self.omega_b,
        }
    }
}

/// Which driven transition the phonon channel dresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// 0 ↔ 1 (pump side).
    A,
    /// 1 ↔ 2 (Stokes side).
    B,
}

/// Mean bath occupation at frequency `_omega`; constant in this model.
pub fn occupation<T: Real>(_omega: T, cfg: &SystemConfig<T>) -> T {
    cfg.n_bar
}

/// Emission rate γ^{++}_{jj}(ω) with its energy-conservation window.
pub fn gamma_pp<T: Real>(omega: T, branch: Branch, cfg: &SystemConfig<T>) -> T {
    gamma_pp_scaled(omega, branch, cfg, cfg.gamma_eff())
}

/// Absorption rate γ^{−−}_{jj}(ω) with its energy-conservation window.
pub fn gamma_mm<T: Real>(omega: T, branch: Branch, cfg: &SystemConfig<T>) -> T {
    gamma_mm_scaled(omega, branch, cfg, cfg.gamma_eff())
}

pub fn gamma_pp_scaled<T: Real>(
    omega: T,
    branch: Branch,
    cfg: &SystemConfig<T>,
    gamma_eff: T,
) -> T {
    let shifted = omega - cfg.offset(branch);
    if shifted > T::zero() {
        gamma_eff * (T::one() + occupation(shifted, cfg))
    } else {
        T::zero()
    }
}

pub fn gamma_mm_scaled<T: Real>(
    omega: T,
    branch: Branch,
    cfg: &SystemConfig<T>,
    gamma_eff: T,
) -> T {
    let shifted = omega + cfg.offset(branch);
    if shifted < T::zero() {
        gamma_eff * occupation(shifted.abs(), cfg)
    } else {
        T::zero()
    }
}

/// The seven channel rates at one frame, plus the relaxation sums derived
/// from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBundle<T> {
    /// γ1…γ7 in order.
    pub gammas: [T; 7],
}

impl<T: Real> RateBundle<T> {
    pub fn evaluate(frame: &FrameState<T>, cfg: &SystemConfig<T>) -> Self {
        Self::evaluate_scaled(frame, cfg, cfg.gamma_eff())
    }

    /// Same, with an explicit Γ_eff (used by the pulse-scaled coupling
    /// option where Γ_eff follows the instantaneous drive power).
    pub fn evaluate_scaled(frame: &FrameState<T>, cfg: &SystemConfig<T>, gamma_eff: T) -> Self {
        let s2t = frame.theta.sin().powi(2);
        let c2t = frame.theta.cos().powi(2);
        let s2p = frame.phi.sin().powi(2);
        let c2p = frame.phi.cos().powi(2);
        let s4p = s2p * s2p;
        let c4p = c2p * c2p;

        let pp = |w: T, br: Branch| gamma_pp_scaled(w, br, cfg, gamma_eff);
        let mm = |w: T, br: Branch| gamma_mm_scaled(w, br, cfg, gamma_eff);

        let w_p0 = frame.bohr(0, 1);
        let w_m0 = frame.bohr(2, 1);
        let w_pm = frame.bohr(0, 2);
        let w_mp = frame.bohr(2, 0);
        let w_0m = frame.bohr(1, 2);
        let w_0p = frame.bohr(1, 0);
        let zero = T::zero();

        let g1 = c2p * (pp(w_p0, Branch::A) * c2t + pp(w_p0, Branch::B) * s2t);
        let g2 = s2p * (pp(w_m0, Branch::A) * c2t + pp(w_m0, Branch::B) * s2t);
        let g3 = c4p * (pp(w_pm, Branch::A) * s2t + pp(w_pm, Branch::B) * c2t)
            + s4p * (mm(w_pm, Branch::A) * s2t + mm(w_pm, Branch::B) * c2t);
        let g4 = s4p * (pp(w_mp, Branch::A) * s2t + pp(w_mp, Branch::B) * c2t)
            + c4p * (mm(w_mp, Branch::A) * s2t + mm(w_mp, Branch::B) * c2t);
        let g5 = s2p
            * c2p
            * ((pp(zero, Branch::A) + mm(zero, Branch::A)) * s2t
                + (pp(zero, Branch::B) + mm(zero, Branch::B)) * c2t);
        let g6 = s2p * (mm(w_0m, Branch::A) * c2t + mm(w_0m, Branch::B) * s2t);
        let g7 = c2p * (mm(w_0p, Branch::A) * c2t + mm(w_0p, Branch::B) * s2t);

        Self { gammas: [g1, g2, g3, g4, g5, g6, g7] }
    }

    /// γ_i for i in 1..=7.
    pub fn gamma(&self, i: usize) -> T {
        self.gammas[i - 1]
    }

    /// Coherence damping ½-sum for the {+,0} pair: ½(γ1+γ3+γ5+γ6+γ7).
    pub fn damping_plus_zero(&self) -> T {
        let [g1, _, g3, _, g5, g6, g7] = self.gammas;
        (g1 + g3 + g5 + g6 + g7) / T::of(2.0)
    }

    /// Coherence damping ½-sum for the {0,−} pair: ½(γ2+γ4+γ5+γ6+γ7).
    pub fn damping_zero_minus(&self) -> T {
        let [_, g2, _, g4, g5, g6, g7] = self.gammas;
        (g2 + g4 + g5 + g6 + g7) / T::of(2.0)
    }

    /// {+,−} pair damping in the condensed-rate convention,
    /// ½(γ1+γ2+γ3+γ4−4γ5). The sign of the γ5 term is what the oracle
    /// comparison flags; see
    /// [`damping_plus_minus_lindblad`](Self::damping_plus_minus_lindblad).
    pub fn damping_plus_minus_condensed(&self) -> T {
        let [g1, g2, g3, g4, g5, _, _] = self.gammas;
        (g1 + g2 + g3 + g4 - T::of(4.0) * g5) / T::of(2.0)
    }

    /// {+,−} pair damping implied by the Lindblad form: the dephasing
    /// channel contributes +2γ5, i.e. ½(γ1+γ2+γ3+γ4+4γ5).
    pub fn damping_plus_minus_lindblad(&self) -> T {
        let [g1, g2, g3, g4, g5, _, _] = self.gammas;
        (g1 + g2 + g3 + g4 + T::of(4.0) * g5) / T::of(2.0)
    }

    /// Population decay rates out of (+, 0, −): (γ1+γ3, γ6+γ7, γ2+γ4).
    pub fn population_decay(&self) -> (T, T, T) {
        let [g1, g2, g3, g4, _, g6, g7] = self.gammas;
        (g1 + g3, g6 + g7, g2 + g4)
    }

    /// Complex relaxation terms Γ_jk for the ordered level pair (j,k),
    /// levels indexed +,0,− = 0,1,2. Coherence entries are
    /// −iω_jk − ½(sum); population diagonals are stored as negative decay
    /// rates so the generator adds them directly.
    pub fn relaxation_term(&self, frame: &FrameState<T>, j: usize, k: usize) -> C<T> {
        let (dp, d0, dm) = self.population_decay();
        if j == k {
            return cre(-[dp, d0, dm][j]);
        }
        let damping = match (j.min(k), j.max(k)) {
            (0, 1) => self.damping_plus_zero(),
            (0, 2) => self.damping_plus_minus_condensed(),
            (1, 2) => self.damping_zero_minus(),
            _ => unreachable!(),
        };
        C::new(-damping, -frame.bohr(j, k))
    }
}
