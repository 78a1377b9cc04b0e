use std::f64::consts::TAU;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::detection::{sample_point, Channel, DetectionModel};
use super::record::{ExperimentRecord, ScanPoint};
use crate::error::{Error, Result};
use crate::motion::{scan_excitation, FockDistribution, SidebandScanModel};
use crate::qubit::{pumping_scan, repump_curve, PumpingModel, RamseyFringe};

/// Samples every point of a scan. `probs[i]` is the true probability at
/// `xs[i]`; point `i` draws from stream `i` of `seed`.
pub fn synth_scan(
    scan_variable: &str,
    unit: &str,
    xs: &[f64],
    probs: &[f64],
    det: &DetectionModel,
    channel: Channel,
    seed: u64,
) -> Result<ExperimentRecord> {
    det.validate()?;
    if xs.is_empty() || xs.len() != probs.len() {
        return Err(Error::domain("scan grid must be non-empty and match the probabilities"));
    }
    let shots = det.shots_per_point;
    let point = |i: usize| -> Result<ScanPoint> {
        let p = probs[i].clamp(0.0, 1.0);
        let successes = if det.noiseless {
            det.effective_probability(p, channel) * shots as f64
        } else {
            sample_point(p, det, channel, seed, i as u64)? as f64
        };
        Ok(ScanPoint { x: xs[i], successes, shots })
    };
    #[cfg(feature = "parallel")]
    let points: Result<Vec<ScanPoint>> = (0..xs.len()).into_par_iter().map(point).collect();
    #[cfg(not(feature = "parallel"))]
    let points: Result<Vec<ScanPoint>> = (0..xs.len()).map(point).collect();

    let mut rec = ExperimentRecord::new(scan_variable, unit, seed)
        .with_meta("channel", match channel {
            Channel::Memory => "memory",
            Channel::Coolant => "coolant",
        })
        .with_meta("noiseless", det.noiseless);
    rec.points = points?;
    Ok(rec)
}

/// Raman detunings from the carrier, rad/s: `points` evenly spaced over
/// `±half_span` around the red sideband, then the same around the blue.
pub fn sideband_grid(mode_freq: f64, half_span: f64, points: usize) -> Vec<f64> {
    let offsets: Vec<f64> = match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points)
            .map(|i| -half_span + 2.0 * half_span * i as f64 / (points - 1) as f64)
            .collect(),
    };
    let red = offsets.iter().map(|d| -mode_freq + d);
    let blue = offsets.iter().map(|d| mode_freq + d);
    red.chain(blue).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SidebandTruth {
    pub dist: FockDistribution,
    pub model: SidebandScanModel,
}

/// Sideband spectrum read out on the coolant. `grid` is in rad/s; the
/// record stores cyclic detuning in Hz.
pub fn synth_sideband_scan(
    truth: &SidebandTruth,
    grid: &[f64],
    det: &DetectionModel,
    seed: u64,
) -> Result<ExperimentRecord> {
    let probs: Vec<f64> = grid.iter().map(|&d| scan_excitation(&truth.dist, &truth.model, d)).collect();
    let xs: Vec<f64> = grid.iter().map(|d| d / TAU).collect();
    let mut rec = synth_scan("raman_detuning", "Hz", &xs, &probs, det, Channel::Coolant, seed)?;
    rec.set_meta("kind", "sideband");
    rec.set_meta("mode_frequency_hz", truth.model.mode_freq / TAU);
    rec.set_meta("pulse_duration_s", truth.model.pulse_duration);
    Ok(rec)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamseyTruth {
    pub fringe: RamseyFringe,
    /// Probability that population outside the clock states ends up in the
    /// shelved manifold.
    pub spectator_upper: f64,
}

impl RamseyTruth {
    /// Shelved-manifold probability with a fraction `clock` prepared in the
    /// clock state.
    pub fn probability(&self, phase: f64, clock: f64) -> f64 {
        clock * self.fringe.probability(phase) + (1.0 - clock) * self.spectator_upper
    }
}

/// Ramsey fringe against the analysis phase (rad), read out by shelving.
pub fn synth_ramsey_scan(
    truth: &RamseyTruth,
    phases: &[f64],
    det: &DetectionModel,
    seed: u64,
) -> Result<ExperimentRecord> {
    let probs: Vec<f64> = phases
        .iter()
        .map(|&phi| truth.probability(phi, det.prep_clock_fraction))
        .collect();
    let mut rec = synth_scan("analysis_phase", "rad", phases, &probs, det, Channel::Memory, seed)?;
    rec.set_meta("kind", "ramsey");
    Ok(rec)
}

#[derive(Debug, Clone, PartialEq)]
pub enum RepumpTruth {
    /// The four-parameter empirical curve.
    Empirical {
        alpha: f64,
        amplitude: f64,
        beta: f64,
        delta_q: f64,
    },
    RateEquations(PumpingModel),
}

/// Upper-manifold population against repump duration (s).
pub fn synth_repump_scan(
    truth: &RepumpTruth,
    durations: &[f64],
    det: &DetectionModel,
    seed: u64,
) -> Result<ExperimentRecord> {
    let probs = match truth {
        RepumpTruth::Empirical {
            alpha,
            amplitude,
            beta,
            delta_q,
        } => durations
            .iter()
            .map(|&t| repump_curve(*alpha, *amplitude, *beta, *delta_q, t))
            .collect(),
        RepumpTruth::RateEquations(model) => pumping_scan(model, durations)?.p_upper,
    };
    let mut rec = synth_scan("repump_duration", "s", durations, &probs, det, Channel::Memory, seed)?;
    rec.set_meta("kind", "repump");
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::thermal_state;
    use crate::qubit::QubitCoherence;

    #[test]
    fn grid_layout() {
        let g = sideband_grid(10.0, 2.0, 5);
        assert_eq!(g, vec![-12.0, -11.0, -10.0, -9.0, -8.0, 8.0, 9.0, 10.0, 11.0, 12.0]);
    }

    #[test]
    fn noiseless_record_equals_truth() {
        let truth = SidebandTruth {
            dist: thermal_state(0.06, 30).unwrap(),
            model: SidebandScanModel::pi_pulse_on_blue(24e-6, 0.13, TAU * 850e3).unwrap(),
        };
        let grid = sideband_grid(truth.model.mode_freq, TAU * 60e3, 20);
        let det = DetectionModel {
            noiseless: true,
            ..DetectionModel::ideal(500)
        };
        let rec = synth_sideband_scan(&truth, &grid, &det, 1).unwrap();
        assert_eq!(rec.points.len(), 40);
        for (p, d) in rec.points.iter().zip(&grid) {
            let expect = scan_excitation(&truth.dist, &truth.model, *d);
            assert!((p.fraction() - expect).abs() < 1e-15);
            assert!((p.x - d / TAU).abs() < 1e-9);
        }
    }

    #[test]
    fn same_seed_same_record() {
        let truth = RamseyTruth {
            fringe: RamseyFringe {
                offset: 0.5,
                amplitude: 0.4,
                phase: 0.1,
                coherence: QubitCoherence::default(),
            },
            spectator_upper: 0.0,
        };
        let phases: Vec<f64> = (0..20).map(|i| TAU * i as f64 / 20.0).collect();
        let det = DetectionModel::default();
        let a = synth_ramsey_scan(&truth, &phases, &det, 5).unwrap();
        let b = synth_ramsey_scan(&truth, &phases, &det, 5).unwrap();
        assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
        let c = synth_ramsey_scan(&truth, &phases, &det, 6).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn empty_grid_is_rejected() {
        let det = DetectionModel::default();
        let truth = RepumpTruth::Empirical {
            alpha: 21.0,
            amplitude: 0.076,
            beta: 60.0,
            delta_q: TAU * 623.0,
        };
        assert!(synth_repump_scan(&truth, &[], &det, 0).is_err());
    }
}
