use crate::config::RunConfig;
use crate::output;
use crate::run::simulate;
use anyhow::Result;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::path::Path;
use stirap_core::frame::{basis_matrix, eigenvalues, FrameState};
use stirap_core::liouville::GeneratorKind;
use stirap_core::oracle::{generator_discrepancies, schrodinger_reference, GeneratorDiscrepancy};
use stirap_core::rates::RateBundle;
use stirap_core::SystemConfig64;

/// Committed list of entries where the analytic table is allowed to differ
/// from the Lindblad construction. Anything outside it fails validation.
const KNOWN_DISCREPANCIES: &str = include_str!("../data/known_discrepancies.json");

pub const GRID_TOLERANCE: f64 = 1e-12;
pub const CLOSED_SYSTEM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct KnownEntry {
    row: usize,
    col: usize,
    kind: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct KnownList {
    comment: String,
    entries: Vec<KnownEntry>,
    double_freq_entries: Vec<KnownEntry>,
}

/// Validation settings.
#[derive(Debug, Clone, Copy)]
pub struct ValidateOptions {
    pub generator: GeneratorKind,
    pub double_freq: bool,
    /// Flat rate of the closed-system cross-check run; the Schrödinger
    /// comparison applies only at 0.
    pub gamma: f64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self { generator: GeneratorKind::Analytic, double_freq: false, gamma: 0.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObservedDiscrepancy {
    pub theta: f64,
    pub phi: f64,
    pub n_bar: f64,
    #[serde(flatten)]
    pub entry: GeneratorDiscrepancy,
    pub kind: String,
    pub expected_abs_diff: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridReport {
    pub points: usize,
    pub entries_checked: usize,
    pub tolerance: f64,
    pub expected: Vec<ObservedDiscrepancy>,
    pub unexpected: Vec<ObservedDiscrepancy>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClosedSystemReport {
    pub gamma: f64,
    pub max_population_deviation: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub generator: String,
    pub double_freq: bool,
    pub grid: GridReport,
    pub closed_system: ClosedSystemReport,
    pub pass: bool,
}

/// The 5×5×3 comparison grid: mixing angles crossed with bath occupations,
/// at fixed nonzero angle rates so every generator entry is exercised.
pub fn comparison_grid() -> Vec<(f64, f64, f64)> {
    let thetas = [0.0, FRAC_PI_4 / 2.0, FRAC_PI_4, 3.0 * FRAC_PI_4 / 2.0, FRAC_PI_2];
    let phis = [0.15, 0.30, FRAC_PI_4, 0.95, 1.25];
    let n_bars = [0.0, 1.0, 10.0];
    let mut grid = Vec::with_capacity(75);
    for &theta in &thetas {
        for &phi in &phis {
            for &n_bar in &n_bars {
                grid.push((theta, phi, n_bar));
            }
        }
    }
    grid
}

/// Synthesize a frame at the requested angles with unit total Rabi
/// frequency; the consistent detuning is cot(2φ).
pub fn frame_at(theta: f64, phi: f64) -> FrameState<f64> {
    let omega = 1.0;
    let delta = (2.0 * phi).cos() / (2.0 * phi).sin();
    let (wp, w0, wm) = eigenvalues(omega, delta);
    FrameState {
        theta,
        phi,
        theta_dot: 0.37,
        phi_dot: 0.19,
        omega,
        delta,
        omega_plus: wp,
        omega_zero: w0,
        omega_minus: wm,
        basis: basis_matrix(theta, phi),
        degenerate: false,
    }
}

fn expected_abs_diff(
    kind: &str,
    row: usize,
    frame: &FrameState<f64>,
    rates: &RateBundle<f64>,
    double_freq: bool,
) -> f64 {
    let g5 = rates.gamma(5);
    let w = [
        frame.bohr(0, 1),
        frame.bohr(0, 2),
        frame.bohr(1, 2),
        frame.bohr(0, 1),
        frame.bohr(0, 2),
        frame.bohr(1, 2),
    ];
    match kind {
        "dephasing_sign" => 4.0 * g5,
        // Extra rotation left on the diagonal relative to the single-Bohr
        // convention: rows 1-3 gain one omega, row 4 spins the wrong way
        // (three omega), rows 5-6 lose their rotation entirely. On rows 2
        // and 5 the dephasing-sign real offset combines in quadrature.
        "diagonal_frequency" => {
            let rotation = match row {
                4 => 3.0 * w[row - 1].abs(),
                _ => w[row - 1].abs(),
            };
            if double_freq && (row == 2 || row == 5) {
                rotation.hypot(4.0 * g5)
            } else {
                rotation
            }
        }
        _ => f64::NAN,
    }
}

/// Compare the analytic generator with the oracle over the grid and split
/// the observed discrepancies into expected and unexpected.
pub fn grid_comparison(double_freq: bool) -> GridReport {
    let known: KnownList =
        serde_json::from_str(KNOWN_DISCREPANCIES).expect("committed list parses");
    let mut allowed: HashMap<(usize, usize), String> = HashMap::new();
    for e in &known.entries {
        allowed.insert((e.row, e.col), e.kind.clone());
    }
    if double_freq {
        for e in &known.double_freq_entries {
            // The frequency offset dominates the entry under this mode.
            allowed.insert((e.row, e.col), e.kind.clone());
        }
    }

    let sys = SystemConfig64 { gamma_flat: 1.0, ..SystemConfig64::default() };
    let grid = comparison_grid();
    let mut report = GridReport {
        points: grid.len(),
        entries_checked: grid.len() * 81,
        tolerance: GRID_TOLERANCE,
        expected: Vec::new(),
        unexpected: Vec::new(),
    };
    for (theta, phi, n_bar) in grid {
        let frame = frame_at(theta, phi);
        let sys = SystemConfig64 { n_bar, ..sys };
        let rates = RateBundle::evaluate(&frame, &sys);
        for entry in generator_discrepancies(&frame, &sys, double_freq, GRID_TOLERANCE) {
            let observed_kind = allowed.get(&(entry.row, entry.col));
            let (kind, expected) = match observed_kind {
                Some(kind) => {
                    let expected =
                        expected_abs_diff(kind, entry.row, &frame, &rates, double_freq);
                    (kind.clone(), expected)
                }
                None => (String::from("unexpected"), f64::NAN),
            };
            let observed = ObservedDiscrepancy {
                theta,
                phi,
                n_bar,
                entry,
                kind,
                expected_abs_diff: expected,
            };
            let matches_prediction = observed.expected_abs_diff.is_finite()
                && (observed.entry.abs_diff - observed.expected_abs_diff).abs()
                    <= GRID_TOLERANCE * (1.0 + observed.expected_abs_diff);
            if observed_kind.is_some() && matches_prediction {
                report.expected.push(observed);
            } else {
                report.unexpected.push(observed);
            }
        }
    }
    report
}

/// Propagate the default full-transfer run with the selected generator and
/// compare populations against the Schrödinger reference at every sample.
pub fn closed_system_check(opts: &ValidateOptions) -> Result<ClosedSystemReport> {
    let mut config = RunConfig::default();
    config.system.gamma_flat = opts.gamma;
    config.run.generator = opts.generator;
    config.run.double_freq = opts.double_freq;
    let failed = |e: String| ClosedSystemReport {
        gamma: opts.gamma,
        max_population_deviation: None,
        tolerance: CLOSED_SYSTEM_TOLERANCE,
        pass: false,
        error: Some(e),
    };
    let series = match simulate(&config) {
        Ok(series) => series,
        Err(e) => return Ok(failed(e.to_string())),
    };
    if opts.gamma != 0.0 {
        // Dissipative runs have no closed-form reference; only the run's
        // own structural checks apply.
        return Ok(ClosedSystemReport {
            gamma: opts.gamma,
            max_population_deviation: None,
            tolerance: CLOSED_SYSTEM_TOLERANCE,
            pass: series.diagnostics.max_trace_drift <= 1e-6,
            error: None,
        });
    }
    let reference = schrodinger_reference(&config.pulse, config.system.delta, &config.run)?;
    let mut max_dev = 0.0f64;
    for (a, b) in series.bare_pops.iter().zip(reference.bare_pops.iter()) {
        for k in 0..3 {
            max_dev = max_dev.max((a[k] - b[k]).abs());
        }
    }
    Ok(ClosedSystemReport {
        gamma: 0.0,
        max_population_deviation: Some(max_dev),
        tolerance: CLOSED_SYSTEM_TOLERANCE,
        pass: max_dev <= CLOSED_SYSTEM_TOLERANCE,
        error: None,
    })
}

pub fn run_validation(opts: &ValidateOptions) -> Result<ValidationReport> {
    let grid = grid_comparison(opts.double_freq);
    let closed_system = closed_system_check(opts)?;
    let pass = grid.unexpected.is_empty() && closed_system.pass;
    Ok(ValidationReport {
        generator: format!("{:?}", opts.generator).to_lowercase(),
        double_freq: opts.double_freq,
        grid,
        closed_system,
        pass,
    })
}

pub fn run_validation_to_dir(opts: &ValidateOptions, out_dir: &Path) -> Result<ValidationReport> {
    let report = run_validation(opts)?;
    output::write_json(&out_dir.join("validation_report.json"), &report)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_no_unexpected_discrepancies() {
        let report = grid_comparison(false);
        assert!(report.unexpected.is_empty(), "{:#?}", report.unexpected);
        // The dephasing-sign entries show up wherever gamma5 is active.
        assert!(!report.expected.is_empty());
        assert!(report
            .expected
            .iter()
            .all(|d| d.kind == "dephasing_sign" && (d.entry.row == 2 || d.entry.row == 5)));
    }

    #[test]
    fn double_freq_mode_flags_the_diagonals_and_nothing_else() {
        let report = grid_comparison(true);
        assert!(report.unexpected.is_empty(), "{:#?}", report.unexpected);
        let mut rows: Vec<usize> = report
            .expected
            .iter()
            .filter(|d| d.kind == "diagonal_frequency")
            .map(|d| d.entry.row)
            .collect();
        rows.sort_unstable();
        rows.dedup();
        assert_eq!(rows, vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn closed_system_check_passes_for_both_generators() {
        for generator in [GeneratorKind::Analytic, GeneratorKind::Oracle] {
            let report = closed_system_check(&ValidateOptions {
                generator,
                ..ValidateOptions::default()
            })
            .unwrap();
            assert!(report.pass, "{generator:?}: {report:?}");
        }
    }

    #[test]
    fn double_freq_propagation_breaks_the_closed_system_check() {
        let report = closed_system_check(&ValidateOptions {
            double_freq: true,
            ..ValidateOptions::default()
        })
        .unwrap();
        assert!(!report.pass, "{report:?}");
    }
}
