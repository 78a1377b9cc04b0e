//! Built-in oracle checks against the loaded physical constants.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use crate::analysis::models::{DecayModel, ExpDecayModel, FringeModel, RepumpModel, SidebandPairModel};
use crate::analysis::{fit_sideband_scan, gradient_mismatch, FitModel};
use crate::constants::AtomicConstants;
use crate::crystal::{axial_modes, lamb_dicke, raman_k_eff, Mode};
use crate::measurement::{sideband_grid, synth_sideband_scan, DetectionModel, SidebandTruth};
use crate::motion::{thermal_state, SidebandScanModel};
use crate::qubit::{gate_error_budget, light_shift_phase, pumping_scan, PumpingModel};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfcheckReport {
    pub checks: Vec<Check>,
}

impl SelfcheckReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(out, "[{}] {:<24} {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail);
        }
        out
    }
}

fn check(name: &'static str, outcome: std::result::Result<(bool, String), crate::Error>) -> Check {
    match outcome {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

const OMEGA_Z: f64 = TAU * 500e3;
const LIGHT_SHIFT_HZ: f64 = 623.0;

fn mode_ratios(c: &AtomicConstants) -> crate::Result<(bool, String)> {
    let m = axial_modes(c.mass_coolant, c.mass_memory, OMEGA_Z)?;
    let [r_in, r_out] = m.ratios();
    let rounded = ((r_in * 100.0).round() / 100.0, (r_out * 100.0).round() / 100.0);
    let eq = axial_modes(40.0, 40.0, OMEGA_Z)?.ratios();
    let ok = rounded == (0.98, 1.70) && (eq[0] - 1.0).abs() < 1e-10 && (eq[1] - 3f64.sqrt()).abs() < 1e-10;
    Ok((ok, format!("in {r_in:.4}, out {r_out:.4}; equal masses {:.12}", eq[1])))
}

fn thermometry(c: &AtomicConstants) -> crate::Result<(bool, String)> {
    let m = axial_modes(c.mass_coolant, c.mass_memory, OMEGA_Z)?;
    let eta = lamb_dicke(&m, 1, Mode::InPhase, raman_k_eff(c.wavelength, 60f64.to_radians()))?;
    let truth = SidebandTruth {
        dist: thermal_state(0.06, 40)?,
        model: SidebandScanModel::pi_pulse_on_blue(24e-6, eta, m.frequency(Mode::InPhase))?,
    };
    let grid = sideband_grid(m.frequency(Mode::InPhase), TAU * 60e3, 20);
    let det = DetectionModel {
        noiseless: true,
        ..DetectionModel::ideal(500)
    };
    let fit = fit_sideband_scan(&synth_sideband_scan(&truth, &grid, &det, 0)?)?;
    let nbar = fit.derived("nbar").map(|d| d.value).unwrap_or(f64::NAN);
    Ok(((nbar - 0.06).abs() < 1e-3, format!("nbar 0.06 -> {nbar:.5}")))
}

fn jacobians() -> crate::Result<(bool, String)> {
    let cases: Vec<(&dyn FitModel, Vec<f64>, Vec<f64>)> = vec![
        (
            &SidebandPairModel { pulse_duration: 24e-6 },
            vec![0.05, -850e3, 20e3, 0.8, 850e3, 21e3],
            vec![-880e3, -851e3, 833e3, 861e3],
        ),
        (&FringeModel, vec![0.3, 0.4, 0.5], vec![0.0, 1.0, 4.0]),
        (&DecayModel, vec![0.9, 0.033], vec![1.0, 5.0, 10.0]),
        (&ExpDecayModel, vec![0.9, 0.034], vec![1.0, 5.0, 10.0]),
        (&RepumpModel, vec![21.0, 0.076, 60.0, TAU * 623.0], vec![1e-4, 1e-3, 4e-3]),
    ];
    let mut worst: f64 = 0.0;
    for (model, p, xs) in &cases {
        for x in xs {
            worst = worst.max(gradient_mismatch(*model, *x, p));
        }
    }
    Ok((worst < 1e-6, format!("worst relative mismatch {worst:.2e}")))
}

fn light_shift() -> crate::Result<(bool, String)> {
    let phi = light_shift_phase(TAU * LIGHT_SHIFT_HZ, 10e-6);
    Ok(((phi - 0.039).abs() < 5e-4, format!("{:.2} mrad per 10 us", phi * 1e3)))
}

fn thermal_budget() -> crate::Result<(bool, String)> {
    let g = gate_error_budget(0.1, 1.0, 0.0, 0.0)?.gamma_thermal;
    let oracle = 0.3 * std::f64::consts::PI.powi(2) * 0.1f64.powi(4) * 2.0;
    let ok = (g - oracle).abs() < 1e-7 && format!("{g:.2e}") == "5.92e-4";
    Ok((ok, format!("gamma_T(0.1, 1) = {g:.4e}")))
}

/// Intensity set by the measured light shift; the spectator pumping rate
/// at that intensity must match the measured baseline rate.
fn pumping_rate(c: &AtomicConstants) -> crate::Result<(bool, String)> {
    let probe = PumpingModel::from_constants(c, 1.0, 0.15);
    let intensity = probe.intensity_for_delta_q(TAU * LIGHT_SHIFT_HZ)?;
    let model = PumpingModel::from_constants(c, intensity, 0.15);
    let alpha = pumping_scan(&model, &[0.0])?.alpha;
    Ok((
        (alpha - 21.0).abs() <= 3.0,
        format!("alpha {alpha:.2} 1/s at {intensity:.2} W/m2"),
    ))
}

pub fn selfcheck(constants: &AtomicConstants) -> SelfcheckReport {
    SelfcheckReport {
        checks: vec![
            check("mode frequencies", mode_ratios(constants)),
            check("thermometry round trip", thermometry(constants)),
            check("fit jacobians", jacobians()),
            check("light-shift phase", light_shift()),
            check("thermal gate error", thermal_budget()),
            check("repump baseline rate", pumping_rate(constants)),
        ],
    }
}
