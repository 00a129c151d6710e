use crate::frame::FrameState;
use crate::linalg::{cre, C, Mat9};
use crate::rates::RateBundle;
use crate::Real;
use serde::{Deserialize, Serialize};

/// Which construction of the 9×9 generator drives the propagation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    /// Closed-form entry table assembled from the angle rates and the
    /// condensed channel rates.
    Analytic,
    /// Brute-force Lindblad superoperator built from the frequency-resolved
    /// jump operators. Default: it is the construction the analytic table is
    /// validated against.
    #[default]
    Oracle,
}

/// Analytic generator M(t).
///
/// Coherence rows carry their own Bohr rotation −iω_jk plus the symmetric
/// damping ½-sums; population rows exchange weight through γ1…γ4, γ6, γ7 and
/// lose it at the channel decay totals. The θ̇/φ̇ entries implement the
/// commutator with the non-adiabatic coupling. With `double_freq` the
/// diagonal stacks the relaxation term's own −iω on top of the explicit
/// rotation entry: rows 1–4 then oscillate at twice the Bohr frequency and
/// rows 5–6 not at all. That mode exists to be flagged by the validation
/// comparison, not for production runs.
pub fn build_generator<T: Real>(
    frame: &FrameState<T>,
    rates: &RateBundle<T>,
    double_freq: bool,
) -> Mat9<T> {
    let a = frame.theta_dot * frame.phi.sin();
    let b = frame.phi_dot;
    let c = frame.theta_dot * frame.phi.cos();
    let [g1, g2, g3, g4, _, g6, g7] = rates.gammas;
    let (dp, d0, dm) = rates.population_decay();

    let w_p0 = frame.bohr(0, 1);
    let w_pm = frame.bohr(0, 2);
    let w_0m = frame.bohr(1, 2);

    let s_p0 = rates.damping_plus_zero();
    let s_pm = rates.damping_plus_minus_condensed();
    let s_0m = rates.damping_zero_minus();

    // Diagonals for the six coherence rows, ordered (+0, +−, 0−, 0+, −+, −0).
    let diag: [C<T>; 6] = if double_freq {
        let two = T::of(2.0);
        [
            C::new(-s_p0, -two * w_p0),
            C::new(-s_pm, -two * w_pm),
            C::new(-s_0m, -two * w_0m),
            C::new(-s_p0, -two * w_p0),
            C::new(-s_pm, T::zero()),
            C::new(-s_0m, T::zero()),
        ]
    } else {
        [
            C::new(-s_p0, -w_p0),
            C::new(-s_pm, -w_pm),
            C::new(-s_0m, -w_0m),
            C::new(-s_p0, w_p0),
            C::new(-s_pm, w_pm),
            C::new(-s_0m, w_0m),
        ]
    };

    let z = T::zero();
    let rows_re: [[T; 9]; 9] = [
        [z, -c, z, z, z, b, -a, a, z],
        [c, z, a, z, z, z, -b, z, b],
        [z, -a, z, -b, z, z, z, c, -c],
        [z, z, b, z, -c, z, -a, a, z],
        [z, z, z, c, z, a, -b, z, b],
        [-b, z, z, z, -a, z, z, c, -c],
        [a, b, z, a, b, z, -dp, g7, g4],
        [-a, z, -c, -a, z, -c, g1, -d0, g2],
        [z, -b, c, z, -b, c, g3, g6, -dm],
    ];

    let mut m = Mat9::zeros();
    for r in 0..9 {
        for col in 0..9 {
            m.0[r][col] = cre(rows_re[r][col]);
        }
    }
    for (r, d) in diag.iter().enumerate() {
        m.0[r][r] = *d;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{basis_matrix, eigenvalues, FrameState};
    use crate::rates::SystemConfig;

    fn frame(theta: f64, phi: f64, theta_dot: f64, phi_dot: f64) -> FrameState<f64> {
        let omega = 1.0;
        let delta = (2.0 * phi).cos() / (2.0 * phi).sin();
        let (wp, w0, wm) = eigenvalues(omega, delta);
        FrameState {
            theta,
            phi,
            theta_dot,
            phi_dot,
            omega,
            delta,
            omega_plus: wp,
            omega_zero: w0,
            omega_minus: wm,
            basis: basis_matrix(theta, phi),
            degenerate: false,
        }
    }

    #[test]
    fn closed_static_generator_is_pure_rotation() {
        let f = frame(0.7, 0.5, 0.0, 0.0);
        let r = RateBundle::evaluate(&f, &SystemConfig::default());
        let m = build_generator(&f, &r, false);
        for row in 0..9 {
            for col in 0..9 {
                if row == col && row < 6 {
                    continue;
                }
                assert_eq!(m.0[row][col].norm(), 0.0, "({row},{col})");
            }
        }
        assert!((m.0[0][0].im + f.bohr(0, 1)).abs() < 1e-15);
        assert!((m.0[3][3].im - f.bohr(0, 1)).abs() < 1e-15);
        assert!((m.0[1][1].im + f.bohr(0, 2)).abs() < 1e-15);
        assert!(m.0[0][0].re == 0.0);
    }

    #[test]
    fn population_columns_conserve_trace() {
        // Sum of the population rows (7..9) must vanish column by column:
        // the theta-dot/phi-dot exchange terms and the channel rates move
        // weight around without creating it.
        let f = frame(0.83, 0.41, 0.37, 0.19);
        let sys = SystemConfig { gamma_flat: 0.8, n_bar: 1.3, ..SystemConfig::default() };
        let r = RateBundle::evaluate(&f, &sys);
        for m in [build_generator(&f, &r, false), build_generator(&f, &r, true)] {
            for col in 0..9 {
                let sum = m.0[6][col] + m.0[7][col] + m.0[8][col];
                assert!(sum.norm() < 1e-15, "column {col}");
            }
        }
    }

    #[test]
    fn conjugate_rows_mirror_each_other() {
        let f = frame(0.83, 0.41, 0.37, 0.19);
        let sys = SystemConfig { gamma_flat: 0.8, n_bar: 1.3, ..SystemConfig::default() };
        let r = RateBundle::evaluate(&f, &sys);
        let m = build_generator(&f, &r, false);
        // Row 4 (rho_{0+}) is the conjugate of row 1 (rho_{+0}) under the
        // pair swap 1<->4, 2<->5, 3<->6 of the coherence components.
        let swap = [3usize, 4, 5, 0, 1, 2, 6, 7, 8];
        for (lo, hi) in [(0usize, 3usize), (1, 4), (2, 5)] {
            for col in 0..9 {
                let mirrored = m.0[lo][swap[col]].conj();
                assert!(
                    (m.0[hi][col] - mirrored).norm() < 1e-15,
                    "rows {lo}/{hi} col {col}"
                );
            }
        }
    }

    #[test]
    fn double_freq_doubles_the_leading_diagonals() {
        let f = frame(0.83, 0.41, 0.37, 0.19);
        let sys = SystemConfig { gamma_flat: 0.3, n_bar: 0.5, ..SystemConfig::default() };
        let r = RateBundle::evaluate(&f, &sys);
        let single = build_generator(&f, &r, false);
        let double = build_generator(&f, &r, true);
        for row in 0..3 {
            assert!((double.0[row][row].im - 2.0 * single.0[row][row].im).abs() < 1e-15);
        }
        // The stacked combination runs the first conjugate row in
        // the same direction as its partner and cancels the other two.
        assert!((double.0[3][3].im + 2.0 * single.0[3][3].im).abs() < 1e-15);
        for row in 4..6 {
            assert_eq!(double.0[row][row].im, 0.0);
        }
        for row in 0..6 {
            assert_eq!(double.0[row][row].re, single.0[row][row].re);
        }
    }
}
