//! Browser bindings: mode structure, a cooling trajectory and a simulated
//! repump scan with its four-parameter fit.

use std::f64::consts::TAU;

use symcool::analysis::fit_repump_scan;
use symcool::crystal::{axial_modes, Mode};
use symcool::measurement::{synth_repump_scan, DetectionModel, RepumpTruth};
use symcool::orchestrator::{Experiment, ExperimentConfig};
use symcool::qubit::pumping_scan;
use wasm_bindgen::prelude::*;

const BASE: &str = include_str!("../../../configs/fig2.cfg");

fn base_experiment(edit: impl FnOnce(&mut ExperimentConfig)) -> symcool::Result<Experiment> {
    let mut cfg = ExperimentConfig::parse(BASE, "fig2.cfg")?;
    edit(&mut cfg);
    Experiment::new(cfg)
}

fn js(e: symcool::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `[in_ratio, out_ratio, in_v1, in_v2, out_v1, out_v2]` for a crystal of
/// masses `m1` (coolant, amu) and `m2`.
#[wasm_bindgen(js_name = modeStructure)]
pub fn mode_structure(m1: f64, m2: f64) -> Result<Vec<f64>, JsError> {
    mode_table(m1, m2).map_err(js)
}

fn mode_table(m1: f64, m2: f64) -> symcool::Result<Vec<f64>> {
    let s = axial_modes(m1, m2, 1.0)?;
    let [r_in, r_out] = s.ratios();
    Ok(vec![r_in, r_out, s.vectors[0][0], s.vectors[0][1], s.vectors[1][0], s.vectors[1][1]])
}

/// Out-of-phase mode after each cycle: `nbar` values for cycles `0..=cycles`
/// followed by the ground-state populations.
#[wasm_bindgen(js_name = coolingCurve)]
pub fn cooling_curve(start_nbar: f64, cycles: usize, photons_per_repump: f64, retune: bool) -> Result<Vec<f64>, JsError> {
    trajectory(start_nbar, cycles, photons_per_repump, retune).map_err(js)
}

fn trajectory(start_nbar: f64, cycles: usize, photons: f64, retune: bool) -> symcool::Result<Vec<f64>> {
    let exp = base_experiment(|c| {
        c.cooling.photons_per_repump = photons;
        if !retune {
            c.cooling.retune_schedule.clear();
        }
    })?;
    let traj = exp.cooling_trajectory(Mode::OutOfPhase, &exp.thermal(start_nbar)?, cycles);
    let mut out: Vec<f64> = traj.iter().map(|d| d.mean_n()).collect();
    out.extend(traj.iter().map(|d| d.p(0)));
    Ok(out)
}

/// Simulated repump scan at one intensity.
#[wasm_bindgen]
pub struct RepumpDemo {
    times: Vec<f64>,
    truth: Vec<f64>,
    measured: Vec<f64>,
    fitted: Vec<f64>,
    params: Vec<f64>,
}

#[wasm_bindgen]
impl RepumpDemo {
    /// `intensity` in W/m², durations up to `max_ms` milliseconds.
    #[wasm_bindgen(constructor)]
    pub fn new(intensity: f64, max_ms: f64, points: usize, shots: u32, seed: u64) -> Result<RepumpDemo, JsError> {
        simulate(intensity, max_ms, points, shots, seed).map_err(js)
    }

    /// Durations in milliseconds.
    #[wasm_bindgen(getter)]
    pub fn times(&self) -> Vec<f64> {
        self.times.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn truth(&self) -> Vec<f64> {
        self.truth.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn measured(&self) -> Vec<f64> {
        self.measured.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn fitted(&self) -> Vec<f64> {
        self.fitted.clone()
    }

    /// `[alpha (1/s), A, beta (1/s), delta_q (Hz)]` followed by their sigmas.
    #[wasm_bindgen(getter)]
    pub fn params(&self) -> Vec<f64> {
        self.params.clone()
    }
}

fn simulate(intensity: f64, max_ms: f64, points: usize, shots: u32, seed: u64) -> symcool::Result<RepumpDemo> {
    let exp = base_experiment(|c| c.pumping.intensity = intensity)?;
    if points < 5 || max_ms.is_nan() || max_ms <= 0.0 {
        return Err(symcool::Error::Domain("need at least 5 points over a positive duration".into()));
    }
    let grid: Vec<f64> = (0..points)
        .map(|k| max_ms * 1e-3 * k as f64 / (points - 1) as f64)
        .collect();
    let truth = pumping_scan(&exp.pumping, &grid)?.p_upper;
    let det = DetectionModel::ideal(shots as u64);
    let rec = synth_repump_scan(&RepumpTruth::RateEquations(exp.pumping.clone()), &grid, &det, seed)?;
    let fit = fit_repump_scan(&rec)?;
    let model = symcool::analysis::models::RepumpModel;
    let fitted = grid
        .iter()
        .map(|&t| symcool::analysis::FitModel::value(&model, t, &fit.params))
        .collect();
    let mut params = fit.params.clone();
    params.extend(&fit.sigmas);
    params[3] /= TAU;
    params[7] /= TAU;
    Ok(RepumpDemo {
        times: grid.iter().map(|t| t * 1e3).collect(),
        truth,
        measured: rec.points.iter().map(|p| p.fraction()).collect(),
        fitted,
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_table_for_calcium_pair() {
        let t = mode_table(40.0, 43.0).unwrap();
        assert!((t[0] - 0.9814).abs() < 1e-4 && (t[1] - 1.7021).abs() < 1e-4);
        assert!(mode_table(-1.0, 43.0).is_err());
    }

    #[test]
    fn trajectory_layout() {
        let v = trajectory(0.6, 10, 3.0, true).unwrap();
        assert_eq!(v.len(), 22);
        assert!((v[0] - 0.6).abs() < 1e-9);
        assert!(v[10] < 0.12 && v[21] > 0.9);
    }

    #[test]
    fn repump_demo_recovers_light_shift() {
        let d = simulate(10.6, 5.0, 50, 1000, 1).unwrap();
        assert_eq!(d.times.len(), 50);
        assert_eq!(d.params.len(), 8);
        assert!((d.params[3] - 624.6).abs() < 5.0 * d.params[7].max(1.0));
        assert!(simulate(10.6, 5.0, 3, 100, 1).is_err());
    }
}
