//! A configuration resolved into physics: mode structure, Lamb-Dicke
//! parameters, pumping rates, and the per-cycle decoherence context. Each
//! method produces one synthetic measurement and its fit.

use std::f64::consts::{PI, TAU};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::config::{ExperimentConfig, Precool, RSigmaSource, RepumpTruthSpec};
use crate::analysis::{fit_contrast_decay, fit_ramsey_fringe, fit_repump_scan, fit_sideband_scan, DecayData, FitResult};
use crate::constants::AtomicConstants;
use crate::cooling::{run_cooling, CoolingParams};
use crate::crystal::{axial_modes, raman_k_eff, Mode, ModeStructure};
use crate::error::Result;
use crate::measurement::{
    sideband_grid, synth_ramsey_scan, synth_repump_scan, synth_sideband_scan, ExperimentRecord, RamseyTruth,
    RepumpTruth, SidebandTruth,
};
use crate::motion::{thermal_state, FockDistribution, SidebandScanModel};
use crate::qubit::{
    pumping_scan, ramsey_sequence, repump_scatter_rate, GapContext, GapOp, PumpingModel, QubitCoherence, ScatterParams,
};

/// Deterministic per-task seed from a base seed and task coordinates.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    parts.iter().fold(mix(base), |acc, p| mix(acc ^ mix(*p)))
}

/// Runs `f` over `items`, concurrently when enabled, keeping input order.
pub fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub constants: AtomicConstants,
    pub modes: ModeStructure,
    pub k_eff: f64,
    /// `eta[ion][mode]`, ion 0 the coolant.
    pub eta: [[f64; 2]; 2],
    pub pumping: PumpingModel,
    /// Spectator pumping rate into the upper manifold, 1/s.
    pub alpha: f64,
    /// Clock light shift under the repump light, rad/s.
    pub delta_q: f64,
    pub h_factor: f64,
    pub gap: GapContext,
}

/// One point of the cycle-count series.
#[derive(Debug, Clone)]
pub struct SeriesPoint {
    pub cycles: usize,
    pub dataset: usize,
    pub nbar_truth: f64,
    pub thermometry: (ExperimentRecord, FitResult),
    pub ramsey: (ExperimentRecord, FitResult),
}

#[derive(Debug, Clone)]
pub struct ContrastSeries {
    pub points: Vec<SeriesPoint>,
    pub data: DecayData,
    pub fit: FitResult,
}

#[derive(Debug, Clone)]
pub struct RepumpControl {
    pub pulses: usize,
    /// Noiseless fringe-amplitude ratio, repump-only over control.
    pub model_ratio: f64,
    pub control: (ExperimentRecord, FitResult),
    pub test: (ExperimentRecord, FitResult),
    pub ratio: f64,
    pub ratio_sigma: f64,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        let constants = match &config.constants {
            Some(path) => AtomicConstants::load(path)?,
            None => AtomicConstants::builtin(),
        };
        Self::with_constants(config, constants)
    }

    pub fn with_constants(config: ExperimentConfig, constants: AtomicConstants) -> Result<Self> {
        let m1 = config.species.coolant_mass.unwrap_or(constants.mass_coolant);
        let m2 = config.species.memory_mass.unwrap_or(constants.mass_memory);
        let modes = axial_modes(m1, m2, config.trap.omega_z)?;
        let k_eff = raman_k_eff(constants.wavelength, config.raman.crossing_angle);
        let eta = modes.lamb_dicke_table(k_eff)?;

        let mut pumping = PumpingModel::from_constants(&constants, config.pumping.intensity, config.detection.prep_clock_fraction);
        pumping.laser_detuning = config.pumping.laser_detuning;
        pumping.elastic_fraction = config.pumping.elastic_fraction;
        let rates = pumping_scan(&pumping, &[0.0])?;
        let h_factor = config.scatter.h_factor.unwrap_or_else(|| pumping.repump_h_factor());

        let tau = config.cooling.repump_duration;
        let scatter = ScatterParams {
            gamma: constants.gamma,
            delta: config.raman.detuning,
            delta_i: constants.smallest_isotope_shift(),
            g_factor: config.scatter.g_factor,
            h_factor,
            eta: eta[0][config.scatter.mode.index()],
            elastic_fraction: config.scatter.elastic_fraction,
            photons_per_repump: config.cooling.photons_per_repump,
            r_sigma_override: match config.scatter.r_sigma {
                RSigmaSource::Scattering => None,
                RSigmaSource::Pumping => Some(repump_scatter_rate(rates.alpha, tau)?),
            },
        };
        scatter.validate()?;
        let mut gap = GapContext {
            scatter,
            eps_raman: config.scatter.eps_raman.unwrap_or(0.0),
            delta_q: rates.delta_q,
            tau_sigma: tau,
            track_leakage: config.scatter.track_leakage,
        };
        if config.scatter.eps_raman.is_none() {
            gap.calibrate_eps_raman(config.scatter.eps_total)?;
        }
        Ok(Experiment {
            config,
            constants,
            modes,
            k_eff,
            eta,
            pumping,
            alpha: rates.alpha,
            delta_q: rates.delta_q,
            h_factor,
            gap,
        })
    }

    pub fn coolant_eta(&self, mode: Mode) -> f64 {
        self.eta[0][mode.index()]
    }

    pub fn cooling_params(&self, mode: Mode) -> CoolingParams {
        let c = &self.config.cooling;
        let eta = self.coolant_eta(mode);
        CoolingParams {
            eta,
            rabi_carrier: PI / (eta * c.pulse_duration),
            pulse_target_n: c.pulse_target_n,
            repump_duration: c.repump_duration,
            photons_per_repump: c.photons_per_repump,
            eta_recoil: c.eta_recoil,
            heating_rate: c.heating_rate,
            cycle_wall_time: c.cycle_wall_time,
            idealized: c.idealized,
            retune_schedule: c.retune_schedule.clone(),
        }
    }

    /// Basis size that keeps the thermal tail of `nbar` below 1e-12.
    pub fn basis_for(&self, nbar: f64) -> usize {
        let base = self.config.cooling.n_max;
        if nbar <= 0.0 {
            return base;
        }
        let q = nbar / (nbar + 1.0);
        base.max(((1e-12f64).ln() / q.ln()).ceil() as usize)
    }

    pub fn thermal(&self, nbar: f64) -> Result<FockDistribution> {
        thermal_state(nbar, self.basis_for(nbar))
    }

    pub fn precooled(&self, method: Precool) -> Result<FockDistribution> {
        self.thermal(match method {
            Precool::Doppler => self.config.cooling.doppler_nbar,
            Precool::Raman => self.config.cooling.raman_nbar,
        })
    }

    pub fn cooling_trajectory(&self, mode: Mode, initial: &FockDistribution, cycles: usize) -> Vec<FockDistribution> {
        run_cooling(initial, &self.cooling_params(mode), cycles)
    }

    pub fn sideband_truth(&self, mode: Mode, dist: &FockDistribution) -> Result<SidebandTruth> {
        Ok(SidebandTruth {
            dist: dist.clone(),
            model: SidebandScanModel::pi_pulse_on_blue(
                self.config.thermometry.pulse_duration,
                self.coolant_eta(mode),
                self.modes.frequency(mode),
            )?,
        })
    }

    pub fn thermometry(&self, mode: Mode, dist: &FockDistribution, seed: u64) -> Result<(ExperimentRecord, FitResult)> {
        let truth = self.sideband_truth(mode, dist)?;
        let t = &self.config.thermometry;
        let grid = sideband_grid(self.modes.frequency(mode), t.half_span, t.points);
        let mut rec = synth_sideband_scan(&truth, &grid, &self.config.detection, seed)?;
        rec.set_meta("mode", mode.label());
        let fit = fit_sideband_scan(&rec)?;
        Ok((rec, fit))
    }

    pub fn phase_grid(&self) -> Vec<f64> {
        let n = self.config.ramsey.phase_points;
        (0..n).map(|k| TAU * k as f64 / n as f64).collect()
    }

    pub fn ramsey_truth(&self, ops: &[GapOp]) -> RamseyTruth {
        let r = &self.config.ramsey;
        let fringe = ramsey_sequence(QubitCoherence::default(), r.pulse_errors, ops, &self.gap, r.detuning, r.gap_time);
        let clock = self.config.detection.prep_clock_fraction;
        let per_spectator = if clock < 1.0 { self.alpha / (1.0 - clock) } else { 0.0 };
        let exposure = ops.len() as f64 * self.gap.tau_sigma;
        RamseyTruth {
            fringe,
            spectator_upper: 1.0 - (-per_spectator * exposure).exp(),
        }
    }

    pub fn ramsey(&self, ops: &[GapOp], seed: u64) -> Result<(ExperimentRecord, FitResult)> {
        let truth = self.ramsey_truth(ops);
        let mut rec = synth_ramsey_scan(&truth, &self.phase_grid(), &self.config.detection, seed)?;
        let cycles = ops.iter().filter(|o| **o == GapOp::CoolingCycle).count();
        rec.set_meta("cooling_cycles", cycles);
        rec.set_meta("repump_only_pulses", ops.len() - cycles);
        let fit = fit_ramsey_fringe(&rec)?;
        Ok((rec, fit))
    }

    /// Temperature and Ramsey contrast after `0..=max_cycles` cooling cycles
    /// of the scatter mode, starting from the Raman pre-cooled state.
    pub fn contrast_series(&self, max_cycles: usize, datasets: usize, seed: u64) -> Result<ContrastSeries> {
        let mode = self.config.scatter.mode;
        let start = self.precooled(Precool::Raman)?;
        let trajectory = self.cooling_trajectory(mode, &start, max_cycles);
        let tasks: Vec<(usize, usize)> = (0..=max_cycles)
            .flat_map(|n| (0..datasets).map(move |d| (n, d)))
            .collect();
        let results = par_map(&tasks, |&(n, d)| -> Result<SeriesPoint> {
            let dist = &trajectory[n];
            let thermometry = self.thermometry(mode, dist, derive_seed(seed, &[5, n as u64, d as u64]))?;
            let ops = vec![GapOp::CoolingCycle; n];
            let ramsey = self.ramsey(&ops, derive_seed(seed, &[2, n as u64, d as u64]))?;
            Ok(SeriesPoint {
                cycles: n,
                dataset: d,
                nbar_truth: dist.mean_n(),
                thermometry,
                ramsey,
            })
        });
        let points: Vec<SeriesPoint> = results.into_iter().collect::<Result<_>>()?;

        let mut data = DecayData::default();
        let mut control = Vec::new();
        for p in &points {
            let f = &p.ramsey.1;
            let (a, s) = (f.params[0], f.sigmas[0]);
            data.push(p.cycles as f64, a, s);
            if p.cycles == 0 {
                control.push((a, s));
            }
        }
        if !control.is_empty() {
            let k = control.len() as f64;
            let mean = control.iter().map(|c| c.0).sum::<f64>() / k;
            let sigma = control.iter().map(|c| c.1 * c.1).sum::<f64>().sqrt() / k;
            data.control = Some((mean, sigma));
        }
        let fit = fit_contrast_decay(&data)?;
        Ok(ContrastSeries { points, data, fit })
    }

    pub fn repump_control(&self, pulses: usize, seed: u64) -> Result<RepumpControl> {
        let ops = vec![GapOp::RepumpOnly; pulses];
        let model_ratio = self.ramsey_truth(&ops).fringe.amplitude / self.ramsey_truth(&[]).fringe.amplitude;
        let control = self.ramsey(&[], derive_seed(seed, &[3, 0]))?;
        let test = self.ramsey(&ops, derive_seed(seed, &[3, 1]))?;
        let (ac, sc) = (control.1.params[0], control.1.sigmas[0]);
        let (at, st) = (test.1.params[0], test.1.sigmas[0]);
        let ratio = at / ac;
        let ratio_sigma = ratio.abs() * ((st / at).powi(2) + (sc / ac).powi(2)).sqrt();
        Ok(RepumpControl {
            pulses,
            model_ratio,
            control,
            test,
            ratio,
            ratio_sigma,
        })
    }

    pub fn repump_truth(&self) -> RepumpTruth {
        match &self.config.repump_scan.truth {
            RepumpTruthSpec::Empirical {
                alpha,
                amplitude,
                beta,
                delta_q,
            } => RepumpTruth::Empirical {
                alpha: *alpha,
                amplitude: *amplitude,
                beta: *beta,
                delta_q: *delta_q,
            },
            RepumpTruthSpec::RateEquations => RepumpTruth::RateEquations(self.pumping.clone()),
        }
    }

    pub fn repump_grid(&self) -> Vec<f64> {
        let s = &self.config.repump_scan;
        (0..s.points)
            .map(|k| s.max_duration * k as f64 / (s.points - 1) as f64)
            .collect()
    }

    pub fn repump_scan(&self, seed: u64) -> Result<(ExperimentRecord, FitResult)> {
        let rec = synth_repump_scan(&self.repump_truth(), &self.repump_grid(), &self.config.detection, seed)?;
        let fit = fit_repump_scan(&rec)?;
        Ok((rec, fit))
    }
}
