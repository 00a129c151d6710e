//! Instantaneous eigen-system of the driven Λ Hamiltonian.
//!
//! The drive couples the outer levels |0⟩, |2⟩ to the intermediate level |1⟩
//! with Rabi frequencies Ω_P, Ω_S and common single-photon detuning Δ. The
//! rotating-frame Hamiltonian
//!
//! ```text
//!         1 ⎛ 0     Ω_P   0   ⎞
//!   H  =  - ⎜ Ω_P   2Δ    Ω_S ⎟
//!         2 ⎝ 0     Ω_S   0   ⎠
//! ```
//!
//! has eigenvalues ω_± = (Δ ± √(Δ²+Ω²))/2 and ω_0 = 0 with Ω² = Ω_P²+Ω_S².
//! The eigenvectors are parameterized by the mixing angles tanθ = Ω_P/Ω_S and
//! tan2φ = Ω/Δ:
//!
//! ```text
//!   |a_+⟩ = sinθ sinφ |0⟩ + cosφ |1⟩ + cosθ sinφ |2⟩
//!   |a_0⟩ = cosθ |0⟩ − sinθ |2⟩
//!   |a_−⟩ = sinθ cosφ |0⟩ − sinφ |1⟩ + cosθ cosφ |2⟩
//! ```
//!
//! In terms of φ the outer eigenvalues are (Ω/2)cotφ and −(Ω/2)tanφ.
//! This module hard-codes the analytic three-level forms; there is no
//! general diagonalization here.

use crate::linalg::{cim, cre, Mat3};
use crate::pulse::PulseConfig;
use crate::Real;
use thiserror::Error;

/// Both envelopes sat at the floor: tanθ = Ω_P/Ω_S is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("degenerate drive: both envelopes at the floor")]
pub struct DegenerateDrive;

/// Snapshot of the adiabatic frame at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameState<T> {
    pub theta: T,
    pub phi: T,
    pub theta_dot: T,
    pub phi_dot: T,
    /// Total Rabi frequency Ω = √(Ω_P² + Ω_S²).
    pub omega: T,
    pub delta: T,
    pub omega_plus: T,
    /// Identically zero; kept so the eigenvalue triple reads off the struct.
    pub omega_zero: T,
    pub omega_minus: T,
    /// Columns are |a_+⟩, |a_0⟩, |a_−⟩ in the bare basis.
    pub basis: Mat3<T>,
    /// True when the drive was at the floor and θ was held from the
    /// previous step.
    pub degenerate: bool,
}

/// tanθ = Ω_P/Ω_S, tan2φ = Ω/Δ, with atan2 branches keeping
/// θ ∈ [0, π/2] and φ ∈ (0, π/2) continuous through Δ = 0 (φ → π/4).
pub fn mixing_angles<T: Real>(
    omega_p: T,
    omega_s: T,
    delta: T,
    floor: T,
) -> Result<(T, T), DegenerateDrive> {
    if omega_p <= floor && omega_s <= floor {
        return Err(DegenerateDrive);
    }
    let theta = omega_p.atan2(omega_s);
    let omega = omega_p.hypot(omega_s);
    let phi = omega.atan2(delta) / T::of(2.0);
    Ok((theta, phi))
}

/// Closed-form angle rates from the envelopes and their derivatives:
/// θ̇ = (Ω̇_P Ω_S − Ω̇_S Ω_P)/Ω², φ̇ = ½(Δ/Ω)(Ω̇_P Ω_P + Ω̇_S Ω_S)/(Δ²+Ω²).
pub fn angle_rates_from<T: Real>(
    (omega_p, omega_p_dot): (T, T),
    (omega_s, omega_s_dot): (T, T),
    delta: T,
) -> (T, T) {
    let omega_sq = omega_p * omega_p + omega_s * omega_s;
    let theta_dot = (omega_p_dot * omega_s - omega_s_dot * omega_p) / omega_sq;
    let omega = omega_sq.sqrt();
    let phi_dot = delta / omega * (omega_p_dot * omega_p + omega_s_dot * omega_s)
        / (delta * delta + omega_sq)
        / T::of(2.0);
    (theta_dot, phi_dot)
}

/// Angle rates for a pulse configuration at time `t`.
pub fn angle_rates<T: Real>(
    cfg: &PulseConfig<T>,
    t: T,
    delta: T,
) -> Result<(T, T), DegenerateDrive> {
    let (p, s) = cfg
        .envelope_with_derivatives(t)
        .map_err(|_| DegenerateDrive)?;
    if p.0 <= cfg.floor() && s.0 <= cfg.floor() {
        return Err(DegenerateDrive);
    }
    Ok(angle_rates_from(p, s, delta))
}

/// (ω_+, ω_0, ω_−) = ((Δ+√(Δ²+Ω²))/2, 0, (Δ−√(Δ²+Ω²))/2).
pub fn eigenvalues<T: Real>(omega: T, delta: T) -> (T, T, T) {
    let root = delta.hypot(omega);
    let half = T::of(0.5);
    (half * (delta + root), T::zero(), half * (delta - root))
}

/// Basis-change matrix with eigenvector columns |a_+⟩, |a_0⟩, |a_−⟩.
/// |a_0⟩ has no |1⟩ component by construction.
pub fn basis_matrix<T: Real>(theta: T, phi: T) -> Mat3<T> {
    let (st, ct) = (theta.sin(), theta.cos());
    let (sp, cp) = (phi.sin(), phi.cos());
    Mat3::from_real([
        [st * sp, ct, st * cp],
        [cp, T::zero(), -sp],
        [ct * sp, -st, ct * cp],
    ])
}

/// Bare-basis rotating-frame Hamiltonian ½[[0,Ω_P,0],[Ω_P,2Δ,Ω_S],[0,Ω_S,0]].
pub fn bare_hamiltonian<T: Real>(omega_p: T, omega_s: T, delta: T) -> Mat3<T> {
    let h = T::of(0.5);
    Mat3::from_real([
        [T::zero(), h * omega_p, T::zero()],
        [h * omega_p, delta, h * omega_s],
        [T::zero(), h * omega_s, T::zero()],
    ])
}

/// Effective Hamiltonian in the adiabatic frame: diag(ω_+, 0, ω_−) plus the
/// non-adiabatic coupling −i B†Ḃ built from θ̇ and φ̇. Hermitian.
pub fn adiabatic_hamiltonian<T: Real>(frame: &FrameState<T>) -> Mat3<T> {
    let a = frame.theta_dot * frame.phi.sin();
    let b = frame.phi_dot;
    let c = frame.theta_dot * frame.phi.cos();
    let mut h = Mat3::zeros();
    h.0[0][0] = cre(frame.omega_plus);
    h.0[2][2] = cre(frame.omega_minus);
    h.0[0][1] = cim(a);
    h.0[1][0] = cim(-a);
    h.0[0][2] = cim(b);
    h.0[2][0] = cim(-b);
    h.0[1][2] = cim(-c);
    h.0[2][1] = cim(c);
    h
}

/// Non-adiabatic coupling ratios |⟨a_±|ȧ_0⟩| / |ω_± − ω_0|. Returns the
/// +∞ sentinel where the corresponding gap vanishes.
pub fn adiabaticity_margin<T: Real>(frame: &FrameState<T>) -> (T, T) {
    let num_plus = (frame.theta_dot * frame.phi.sin()).abs();
    let num_minus = (frame.theta_dot * frame.phi.cos()).abs();
    let ratio = |num: T, gap: T| {
        if gap == T::zero() {
            if num == T::zero() { T::zero() } else { T::infinity() }
        } else {
            num / gap
        }
    };
    (
        ratio(num_plus, frame.omega_plus.abs()),
        ratio(num_minus, frame.omega_minus.abs()),
    )
}

impl<T: Real> FrameState<T> {
    /// Frame at time `t`. When both envelopes are at the floor, θ is held at
    /// `prev_theta` with θ̇ = φ̇ = 0 (the dark state is stationary there);
    /// with no previous angle the drive is degenerate from the start.
    pub fn at(
        cfg: &PulseConfig<T>,
        t: T,
        delta: T,
        prev_theta: Option<T>,
    ) -> Result<Self, DegenerateDrive> {
        let ((op, dop), (os, dos)) = cfg
            .envelope_with_derivatives(t)
            .map_err(|_| DegenerateDrive)?;
        let floor = cfg.floor();
        let omega = op.hypot(os);
        let (theta, phi, theta_dot, phi_dot, degenerate) =
            match mixing_angles(op, os, delta, floor) {
                Ok((theta, phi)) => {
                    let (td, pd) = angle_rates_from((op, dop), (os, dos), delta);
                    (theta, phi, td, pd, false)
                }
                Err(DegenerateDrive) => {
                    let theta = prev_theta.ok_or(DegenerateDrive)?;
                    let phi = omega.atan2(delta) / T::of(2.0);
                    (theta, phi, T::zero(), T::zero(), true)
                }
            };
        let (omega_plus, omega_zero, omega_minus) = eigenvalues(omega, delta);
        Ok(Self {
            theta,
            phi,
            theta_dot,
            phi_dot,
            omega,
            delta,
            omega_plus,
            omega_zero,
            omega_minus,
            basis: basis_matrix(theta, phi),
            degenerate,
        })
    }

    /// Bohr frequency ω_j − ω_k for levels indexed +,0,− = 0,1,2.
    pub fn bohr(&self, j: usize, k: usize) -> T {
        let w = [self.omega_plus, self.omega_zero, self.omega_minus];
        w[j] - w[k]
    }
}
