use crate::frame::FrameState;
use crate::linalg::{czero, C, Mat3};
use crate::Real;

/// Level pair (j,k) of each vector component, levels +,0,− = 0,1,2.
pub const COMPONENT_PAIRS: [(usize, usize); 9] = [
    (0, 1), // rho_{+0}
    (0, 2), // rho_{+-}
    (1, 2), // rho_{0-}
    (1, 0), // rho_{0+}
    (2, 0), // rho_{-+}
    (2, 1), // rho_{-0}
    (0, 0), // rho_{++}
    (1, 1), // rho_{00}
    (2, 2), // rho_{--}
];

/// Vector index of the (j,k) density-matrix element.
pub fn component_index(j: usize, k: usize) -> usize {
    COMPONENT_PAIRS
        .iter()
        .position(|&p| p == (j, k))
        .expect("level indices must be 0..3")
}

/// Density matrix in the adiabatic basis, flattened in the fixed ordering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticStateVector<T> {
    pub v: [C<T>; 9],
}

impl<T: Real> AdiabaticStateVector<T> {
    pub fn zeros() -> Self {
        Self { v: [czero(); 9] }
    }

    pub fn from_density(m: &Mat3<T>) -> Self {
        let mut s = Self::zeros();
        for (idx, &(j, k)) in COMPONENT_PAIRS.iter().enumerate() {
            s.v[idx] = m.0[j][k];
        }
        s
    }

    pub fn to_density(&self) -> Mat3<T> {
        let mut m = Mat3::zeros();
        for (idx, &(j, k)) in COMPONENT_PAIRS.iter().enumerate() {
            m.0[j][k] = self.v[idx];
        }
        m
    }

    /// Bare-basis ground state |0⟩⟨0| expressed in the frame's eigenbasis.
    /// At the window start (Stokes-only drive, θ ≈ 0) this is the pure
    /// dark state up to envelope-tail corrections.
    pub fn initial_ground_state(frame: &FrameState<T>) -> Self {
        let mut m = Mat3::zeros();
        for j in 0..3 {
            for k in 0..3 {
                // <a_j|0><0|a_k>; the basis is real.
                m.0[j][k] = frame.basis.0[0][j].conj() * frame.basis.0[0][k];
            }
        }
        Self::from_density(&m)
    }

    /// Rotate back to the bare basis: B ρ B†.
    pub fn to_bare(&self, frame: &FrameState<T>) -> Mat3<T> {
        let rho = self.to_density();
        frame.basis.mul(&rho).mul(&frame.basis.adjoint())
    }

    pub fn trace(&self) -> C<T> {
        self.v[6] + self.v[7] + self.v[8]
    }

    /// Adiabatic populations (ρ_{++}, ρ_{00}, ρ_{−−}), real parts.
    pub fn adiabatic_populations(&self) -> [T; 3] {
        [self.v[6].re, self.v[7].re, self.v[8].re]
    }

    /// Largest violation of the conjugate-pair structure, including
    /// imaginary parts left on the populations.
    pub fn hermiticity_defect(&self) -> T {
        let mut d = T::zero();
        for (lo, hi) in [(0usize, 3usize), (1, 4), (2, 5)] {
            d = d.max((self.v[hi] - self.v[lo].conj()).norm());
        }
        for p in 6..9 {
            d = d.max(self.v[p].im.abs());
        }
        d
    }

    /// Checks trace, population reality, and Hermiticity to 1e-9.
    pub fn validate(&self) -> Result<(), String> {
        let tol = T::of(1e-9);
        let tr = self.trace();
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return Err(format!("trace {} differs from 1 beyond 1e-9", tr.re));
        }
        if self.hermiticity_defect() > tol {
            return Err("Hermiticity defect beyond 1e-9".to_string());
        }
        Ok(())
    }
}

/// Per-run integration health indicators.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct Diagnostics {
    pub max_trace_drift: f64,
    pub max_hermiticity_defect: f64,
    /// Largest non-adiabatic coupling ratio seen while the drive was active
    /// (Ω ≥ Ω0/20).
    pub max_adiabaticity_ratio: f64,
    /// True if the active-window ratio ever exceeded 0.1.
    pub adiabaticity_flagged: bool,
    pub steps: usize,
    pub dt: f64,
}

/// Sampled trajectory of one propagation.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T> {
    pub times: Vec<T>,
    /// (ρ_00, ρ_11, ρ_22) in the bare basis.
    pub bare_pops: Vec<[T; 3]>,
    /// (ρ_01, ρ_12, ρ_02) in the bare basis.
    pub bare_cohs: Vec<[C<T>; 3]>,
    /// (ρ_{++}, ρ_{00}, ρ_{−−}).
    pub adiabatic_pops: Vec<[T; 3]>,
    pub diagnostics: Diagnostics,
}

impl<T: Real> TimeSeries<T> {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            bare_pops: Vec::with_capacity(n),
            bare_cohs: Vec::with_capacity(n),
            adiabatic_pops: Vec::with_capacity(n),
            diagnostics: Diagnostics::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn push(&mut self, t: T, state: &AdiabaticStateVector<T>, frame: &FrameState<T>) {
        let bare = state.to_bare(frame);
        self.times.push(t);
        self.bare_pops
            .push([bare.0[0][0].re, bare.0[1][1].re, bare.0[2][2].re]);
        self.bare_cohs.push([bare.0[0][1], bare.0[1][2], bare.0[0][2]]);
        self.adiabatic_pops.push(state.adiabatic_populations());
    }

    pub fn final_bare_pops(&self) -> [T; 3] {
        *self.bare_pops.last().expect("series is non-empty")
    }

    pub fn final_bare_cohs(&self) -> [C<T>; 3] {
        *self.bare_cohs.last().expect("series is non-empty")
    }
}
