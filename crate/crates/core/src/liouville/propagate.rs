use super::generator::{build_generator, GeneratorKind};
use super::state::{AdiabaticStateVector, TimeSeries};
use crate::error::PropagationError;
use crate::frame::{adiabaticity_margin, FrameState};
use crate::linalg::Mat9;
use crate::oracle;
use crate::pulse::PulseConfig;
use crate::rates::{RateBundle, SystemConfig};
use crate::Real;
use serde::{Deserialize, Serialize};

/// Integration controls. The effective step is
/// `min(dt_max, sigma/200)`; `dt_max` defaults to σ/500.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropagateOptions<T> {
    pub dt_max: Option<T>,
    /// Target number of recorded samples per run.
    pub samples: usize,
    /// Record every n-th step instead of deriving the stride from `samples`.
    pub stride: Option<usize>,
    pub generator: GeneratorKind,
    /// Use the literal doubled-diagonal convention in the analytic
    /// generator (comparison mode only; ignored by the oracle generator).
    pub double_freq: bool,
}

impl<T: Real> Default for PropagateOptions<T> {
    fn default() -> Self {
        Self {
            dt_max: None,
            samples: 200,
            stride: None,
            generator: GeneratorKind::default(),
            double_freq: false,
        }
    }
}

/// Resolved step layout shared by the master-equation propagator and the
/// closed-system reference integrator so both sample identical times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPlan<T> {
    pub n_steps: usize,
    pub h: T,
    pub stride: usize,
}

impl<T: Real> StepPlan<T> {
    pub fn new(pulse: &PulseConfig<T>, opts: &PropagateOptions<T>) -> Result<Self, PropagationError> {
        let span = pulse.t_end - pulse.t_start;
        let cap = pulse.sigma / T::of(200.0);
        let dt_max = opts.dt_max.unwrap_or(pulse.sigma / T::of(500.0));
        if dt_max <= T::zero() || !dt_max.is_finite() {
            return Err(PropagationError::InvalidSetup("dt_max must be > 0".into()));
        }
        let dt = dt_max.min(cap);
        let n_steps = (span / dt).ceil().to_f64_lossy() as usize;
        let n_steps = n_steps.max(1);
        let h = span / T::of(n_steps as f64);
        let stride = opts
            .stride
            .unwrap_or_else(|| (n_steps / opts.samples.max(1)).max(1));
        Ok(Self { n_steps, h, stride: stride.max(1) })
    }

    pub fn record_at(&self, step_done: usize) -> bool {
        step_done % self.stride == 0 || step_done == self.n_steps
    }
}

struct FrameTracker<T> {
    prev_theta: Option<T>,
}

impl<T: Real> FrameTracker<T> {
    fn frame_at(
        &mut self,
        pulse: &PulseConfig<T>,
        delta: T,
        t: T,
    ) -> Result<FrameState<T>, PropagationError> {
        let f = FrameState::at(pulse, t, delta, self.prev_theta)
            .map_err(|_| PropagationError::DegenerateDrive { t: t.to_f64_lossy() })?;
        if !f.degenerate {
            self.prev_theta = Some(f.theta);
        }
        Ok(f)
    }
}

fn generator_at<T: Real>(
    frame: &FrameState<T>,
    pulse: &PulseConfig<T>,
    sys: &SystemConfig<T>,
    opts: &PropagateOptions<T>,
) -> Mat9<T> {
    let mut gamma_eff = sys.gamma_eff();
    if sys.pulse_scaled_coupling {
        let scale = frame.omega / pulse.omega0;
        gamma_eff = gamma_eff * scale * scale;
    }
    match opts.generator {
        GeneratorKind::Analytic => {
            let rates = RateBundle::evaluate_scaled(frame, sys, gamma_eff);
            build_generator(frame, &rates, opts.double_freq)
        }
        GeneratorKind::Oracle => oracle::oracle_generator_scaled(frame, sys, gamma_eff),
    }
}

fn axpy<T: Real>(
    v: &[num_complex::Complex<T>; 9],
    k: &[num_complex::Complex<T>; 9],
    s: T,
) -> [num_complex::Complex<T>; 9] {
    std::array::from_fn(|i| v[i] + k[i] * s)
}

/// Integrate dρ/dt = M(t)ρ over the pulse window with classic fixed-step
/// RK4, recording samples on the plan's stride. Trace and positivity are
/// checked every step and fail the run beyond tolerance; nothing is ever
/// rescaled.
pub fn propagate<T: Real>(
    pulse: &PulseConfig<T>,
    sys: &SystemConfig<T>,
    rho0: &AdiabaticStateVector<T>,
    opts: &PropagateOptions<T>,
) -> Result<TimeSeries<T>, PropagationError> {
    pulse
        .validate()
        .map_err(|e| PropagationError::InvalidSetup(e.to_string()))?;
    sys.validate()
        .map_err(|e| PropagationError::InvalidSetup(e.to_string()))?;
    rho0.validate()
        .map_err(PropagationError::InvalidInitialState)?;

    let plan = StepPlan::new(pulse, opts)?;
    let h = plan.h;
    let half = h / T::of(2.0);
    let sixth = h / T::of(6.0);
    let two = T::of(2.0);

    let mut tracker = FrameTracker { prev_theta: None };
    let mut series = TimeSeries::with_capacity(plan.n_steps / plan.stride + 2);
    series.diagnostics.dt = h.to_f64_lossy();
    series.diagnostics.steps = plan.n_steps;

    let mut v = rho0.v;
    let frame_start = tracker.frame_at(pulse, sys.delta, pulse.t_start)?;
    let mut m_start = generator_at(&frame_start, pulse, sys, opts);
    series.push(pulse.t_start, &AdiabaticStateVector { v }, &frame_start);
    observe_frame(&mut series, pulse, &frame_start);

    for step in 0..plan.n_steps {
        let t = pulse.t_start + h * T::of(step as f64);
        let frame_mid = tracker.frame_at(pulse, sys.delta, t + half)?;
        let frame_end = tracker.frame_at(pulse, sys.delta, t + h)?;
        let m_mid = generator_at(&frame_mid, pulse, sys, opts);
        let m_end = generator_at(&frame_end, pulse, sys, opts);

        let k1 = m_start.apply(&v);
        let k2 = m_mid.apply(&axpy(&v, &k1, half));
        let k3 = m_mid.apply(&axpy(&v, &k2, half));
        let k4 = m_end.apply(&axpy(&v, &k3, h));
        for i in 0..9 {
            v[i] += (k1[i] + (k2[i] + k3[i]) * two + k4[i]) * sixth;
        }

        let state = AdiabaticStateVector { v };
        check_step(&state, &mut series, (t + h).to_f64_lossy())?;
        observe_frame(&mut series, pulse, &frame_end);
        if plan.record_at(step + 1) {
            series.push(t + h, &state, &frame_end);
        }

        m_start = m_end;
    }
    Ok(series)
}

fn check_step<T: Real>(
    state: &AdiabaticStateVector<T>,
    series: &mut TimeSeries<T>,
    t: f64,
) -> Result<(), PropagationError> {
    let tr = state.trace();
    let drift = ((tr.re - T::one()).abs().max(tr.im.abs())).to_f64_lossy();
    series.diagnostics.max_trace_drift = series.diagnostics.max_trace_drift.max(drift);
    if drift > 1e-6 {
        return Err(PropagationError::TraceDrift { t, drift });
    }
    let defect = state.hermiticity_defect().to_f64_lossy();
    series.diagnostics.max_hermiticity_defect =
        series.diagnostics.max_hermiticity_defect.max(defect);
    for p in state.adiabatic_populations() {
        let p = p.to_f64_lossy();
        if p < -1e-4 {
            return Err(PropagationError::NegativePopulation { t, value: p });
        }
    }
    Ok(())
}

fn observe_frame<T: Real>(
    series: &mut TimeSeries<T>,
    pulse: &PulseConfig<T>,
    frame: &FrameState<T>,
) {
    // The raw coupling-to-gap ratio diverges harmlessly as the drive dies;
    // only the drive-active window is diagnostic.
    if frame.omega < pulse.omega0 / T::of(20.0) {
        return;
    }
    let (rp, rm) = adiabaticity_margin(frame);
    let worst = rp.max(rm).to_f64_lossy();
    series.diagnostics.max_adiabaticity_ratio =
        series.diagnostics.max_adiabaticity_ratio.max(worst);
    if worst > 0.1 {
        series.diagnostics.adiabaticity_flagged = true;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cre;
    use crate::pulse::Protocol;

    fn dark_start<T: Real>(pulse: &PulseConfig<T>, delta: T) -> AdiabaticStateVector<T> {
        let f = FrameState::at(pulse, pulse.t_start, delta, None).unwrap();
        AdiabaticStateVector::initial_ground_state(&f)
    }

    fn run(
        pulse: &PulseConfig<f64>,
        sys: &SystemConfig<f64>,
        opts: &PropagateOptions<f64>,
    ) -> TimeSeries<f64> {
        propagate(pulse, sys, &dark_start(pulse, sys.delta), opts).unwrap()
    }

    #[test]
    fn closed_stirap_transfers_population() {
        let pulse = PulseConfig::default();
        let sys = SystemConfig::default();
        let series = run(&pulse, &sys, &PropagateOptions::default());
        let [_, p1, p2] = series.final_bare_pops();
        assert!(p2 >= 0.99, "rho22 = {p2}");
        assert!(p1 < 0.01);
        assert!(series.diagnostics.max_trace_drift <= 1e-6);
        assert!(series.diagnostics.max_hermiticity_defect <= 1e-8);
        assert!(!series.diagnostics.adiabaticity_flagged);
    }

    #[test]
    fn closed_fstirap_builds_half_half_superposition() {
        // At the default delay the state freezes ~0.02 rad short of alpha
        // while the 0/- gap closes; delay = 2 sigma keeps the split well
        // inside the half-half tolerance.
        let pulse = PulseConfig {
            protocol: Protocol::Fstirap,
            delay: 2.0,
            ..PulseConfig::default()
        };
        let sys = SystemConfig::default();
        let series = run(&pulse, &sys, &PropagateOptions::default());
        let [p0, p1, p2] = series.final_bare_pops();
        assert!((p0 - 0.5).abs() < 0.02, "rho00 = {p0}");
        assert!((p2 - 0.5).abs() < 0.02, "rho22 = {p2}");
        assert!(p1 <= 0.01);
        let coh02 = series.final_bare_cohs()[2];
        assert!((coh02.norm() - 0.5).abs() < 0.02);
    }

    #[test]
    fn generators_identical_in_the_closed_limit() {
        let pulse = PulseConfig::default();
        let sys = SystemConfig::default();
        let oracle = run(&pulse, &sys, &PropagateOptions::default());
        let analytic = run(
            &pulse,
            &sys,
            &PropagateOptions { generator: GeneratorKind::Analytic, ..Default::default() },
        );
        for (a, b) in oracle.bare_pops.iter().zip(analytic.bare_pops.iter()) {
            for k in 0..3 {
                assert!((a[k] - b[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn generators_stay_close_on_a_dissipative_run() {
        let pulse = PulseConfig::default();
        let sys = SystemConfig { gamma_flat: 0.05, n_bar: 2.0, ..SystemConfig::default() };
        let oracle = run(&pulse, &sys, &PropagateOptions::default());
        let analytic = run(
            &pulse,
            &sys,
            &PropagateOptions { generator: GeneratorKind::Analytic, ..Default::default() },
        );
        // The analytic table keeps the condensed-rate dephasing sign in
        // the {+,-} damping, so the trajectories drift apart a little once
        // gamma5 is active; they must stay physically close.
        for (a, b) in oracle.bare_pops.iter().zip(analytic.bare_pops.iter()) {
            for k in 0..3 {
                assert!((a[k] - b[k]).abs() < 0.05);
            }
        }
    }

    #[test]
    fn strong_coupling_hot_bath_equilibrates_to_thirds() {
        for proto in [Protocol::Stirap, Protocol::Fstirap] {
            let pulse = PulseConfig { protocol: proto, ..PulseConfig::default() };
            let sys = SystemConfig { gamma_flat: 1.0, n_bar: 10.0, ..SystemConfig::default() };
            let series = run(&pulse, &sys, &PropagateOptions::default());
            for p in series.final_bare_pops() {
                assert!((p - 1.0 / 3.0).abs() < 0.05, "{proto:?}: {p}");
            }
        }
    }

    #[test]
    fn dissipation_always_on_drains_into_dark_state_at_zero_temperature() {
        // N = 0 leaves no flow out of |a_0>; with the window extended past
        // the pulses the bare populations land on the final dark state.
        let pulse = PulseConfig { t_end: 10.0, t_start: -6.0, ..PulseConfig::default() };
        let sys = SystemConfig { gamma_flat: 1.0, ..SystemConfig::default() };
        let series = run(&pulse, &sys, &PropagateOptions::default());
        let pops = series.adiabatic_pops.last().unwrap();
        assert!(pops[1] > 0.98, "dark-state weight {}", pops[1]);
    }

    #[test]
    fn step_halving_shifts_solution_below_1e7() {
        let pulse = PulseConfig::default();
        for sys in [
            SystemConfig::default(),
            SystemConfig { gamma_flat: 1.0, n_bar: 10.0, ..SystemConfig::default() },
        ] {
            let coarse = run(&pulse, &sys, &PropagateOptions::default());
            let opts_fine = PropagateOptions {
                dt_max: Some(pulse.sigma / 1000.0),
                ..PropagateOptions::default()
            };
            let fine = run(&pulse, &sys, &opts_fine);
            let mut shift = 0.0f64;
            for (a, b) in coarse
                .final_bare_pops()
                .iter()
                .zip(fine.final_bare_pops().iter())
            {
                shift = shift.max((a - b).abs());
            }
            assert!(shift <= 1e-7, "shift = {shift:e}");
        }
    }

    #[test]
    fn frozen_angles_relax_onto_the_dark_state() {
        // Static frame, zero occupation: every dissipative flow ends in
        // |a_0>, so the propagated state must converge there.
        use crate::frame::{basis_matrix, eigenvalues};
        use crate::liouville::build_generator;
        use crate::rates::RateBundle;
        let (theta, phi) = (0.9f64, 0.6f64);
        let omega = 1.0;
        let delta = (2.0 * phi).cos() / (2.0 * phi).sin();
        let (wp, w0, wm) = eigenvalues(omega, delta);
        let frame = FrameState {
            theta,
            phi,
            theta_dot: 0.0,
            phi_dot: 0.0,
            omega,
            delta,
            omega_plus: wp,
            omega_zero: w0,
            omega_minus: wm,
            basis: basis_matrix(theta, phi),
            degenerate: false,
        };
        let sys = SystemConfig { gamma_flat: 0.5, ..SystemConfig::default() };
        let m = build_generator(&frame, &RateBundle::evaluate(&frame, &sys), false);
        // Start far from the dark state and integrate the static generator.
        let mut v = AdiabaticStateVector::zeros().v;
        v[6] = cre(0.7);
        v[7] = cre(0.1);
        v[8] = cre(0.2);
        v[0] = crate::linalg::C::new(0.1, 0.05);
        v[3] = v[0].conj();
        let dt = 0.005;
        for _ in 0..(160.0 / dt) as usize {
            let k1 = m.apply(&v);
            let k2 = m.apply(&axpy(&v, &k1, dt / 2.0));
            let k3 = m.apply(&axpy(&v, &k2, dt / 2.0));
            let k4 = m.apply(&axpy(&v, &k3, dt));
            for i in 0..9 {
                v[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
            }
        }
        assert!((v[7].re - 1.0).abs() < 1e-9, "dark weight {}", v[7].re);
        assert!(v[6].norm() < 1e-9 && v[8].norm() < 1e-9);
        for c in &v[..6] {
            assert!(c.norm() < 1e-9);
        }
    }

    #[test]
    fn sampled_bare_populations_stay_in_the_unit_interval() {
        let pulse = PulseConfig::default();
        let sys = SystemConfig { gamma_flat: 0.1, n_bar: 3.0, ..SystemConfig::default() };
        let series = run(&pulse, &sys, &PropagateOptions::default());
        for pops in &series.bare_pops {
            for &p in pops {
                assert!((-1e-6..=1.0 + 1e-6).contains(&p), "population {p}");
            }
        }
    }

    #[test]
    fn negative_population_guard_fires() {
        // A traceless-perturbed start is a legal state vector (trace,
        // Hermiticity) but sits just past the positivity guard.
        let pulse = PulseConfig::default();
        let sys = SystemConfig::default();
        let mut rho0 = AdiabaticStateVector::zeros();
        rho0.v[6] = cre(-2e-4);
        rho0.v[7] = cre(1.0 + 2e-4);
        let err = propagate(&pulse, &sys, &rho0, &PropagateOptions::default()).unwrap_err();
        assert!(matches!(err, PropagationError::NegativePopulation { .. }), "{err}");
    }

    #[test]
    fn rejects_invalid_initial_state() {
        let pulse = PulseConfig::default();
        let sys = SystemConfig::default();
        let mut bad = dark_start(&pulse, sys.delta);
        bad.v[7] = cre(0.5);
        let err = propagate(&pulse, &sys, &bad, &PropagateOptions::default());
        assert!(matches!(err, Err(PropagationError::InvalidInitialState(_))));
    }

    #[test]
    fn rejects_invalid_configs_by_field() {
        let pulse = PulseConfig { sigma: -1.0, ..PulseConfig::default() };
        let sys = SystemConfig::default();
        let err = propagate(
            &pulse,
            &sys,
            &AdiabaticStateVector::zeros(),
            &PropagateOptions::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("pulse.sigma"));
    }

    #[test]
    fn f32_propagation_smoke() {
        // Single-precision instantiation of the full path. A short window
        // keeps the accumulated f32 rounding inside the trace tolerance.
        let pulse = PulseConfig::<f32> { t_start: -2.0, t_end: 2.0, ..PulseConfig::default() };
        let sys = SystemConfig::<f32> { gamma_flat: 0.1, n_bar: 1.0, ..SystemConfig::default() };
        let f0 = FrameState::at(&pulse, pulse.t_start, sys.delta, None).unwrap();
        let rho0 = AdiabaticStateVector::initial_ground_state(&f0);
        let series = propagate(&pulse, &sys, &rho0, &PropagateOptions::default()).unwrap();
        let pops = series.final_bare_pops();
        assert!((pops.iter().sum::<f32>() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn weak_drive_flags_adiabaticity() {
        let pulse = PulseConfig { omega0: 1.0, ..PulseConfig::default() };
        let sys = SystemConfig::default();
        let series = run(&pulse, &sys, &PropagateOptions::default());
        assert!(series.diagnostics.adiabaticity_flagged);
        assert!(series.diagnostics.max_adiabaticity_ratio > 0.1);
    }

    #[test]
    fn pulse_scaled_coupling_freezes_dissipation_outside_pulses() {
        // With the coupling following the drive power, a hot strong bath
        // cannot act before the pulses arrive.
        let pulse = PulseConfig::default();
        let sys = SystemConfig {
            gamma_flat: 1.0,
            n_bar: 10.0,
            pulse_scaled_coupling: true,
            ..SystemConfig::default()
        };
        let series = run(&pulse, &sys, &PropagateOptions::default());
        // Early samples: still essentially the pure dark state.
        let early = &series.adiabatic_pops[series.len() / 10];
        assert!(early[1] > 0.95, "early dark weight {}", early[1]);
    }
}
