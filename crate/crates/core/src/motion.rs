//! Fock-basis motional state of one normal mode and the sideband
//! thermometry forward model.

use crate::error::{Error, Result};

pub const DEFAULT_N_MAX: usize = 30;
const NORM_TOL: f64 = 1e-9;

/// Diagonal motional state: `probs[n]` for `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDistribution {
    probs: Vec<f64>,
}

impl FockDistribution {
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::domain("Fock distribution needs at least one level"));
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::domain(format!("negative or non-finite probability {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::domain(format!("probabilities sum to {total}, not 1")));
        }
        Ok(FockDistribution { probs })
    }

    /// Builds without validation; used by the cooling maps, which preserve
    /// normalization by construction.
    pub(crate) fn from_probs_unchecked(probs: Vec<f64>) -> Self {
        FockDistribution { probs }
    }

    pub fn ground(n_max: usize) -> Self {
        Self::fock(0, n_max)
    }

    pub fn fock(n: usize, n_max: usize) -> Self {
        let mut probs = vec![0.0; n_max.max(n) + 1];
        probs[n] = 1.0;
        FockDistribution { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn n_max(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn p(&self, n: usize) -> f64 {
        self.probs.get(n).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean_n(&self) -> f64 {
        mean_n(self)
    }
}

/// Truncated thermal state, `p(n) ∝ (nbar / (nbar + 1))^n`.
pub fn thermal_state(nbar: f64, n_max: usize) -> Result<FockDistribution> {
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(Error::domain(format!("mean occupation must be >= 0, got {nbar}")));
    }
    let q = nbar / (nbar + 1.0);
    let mut probs = Vec::with_capacity(n_max + 1);
    let mut w = 1.0;
    for _ in 0..=n_max {
        probs.push(w);
        w *= q;
    }
    let z: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= z);
    Ok(FockDistribution { probs })
}

pub fn mean_n(dist: &FockDistribution) -> f64 {
    dist.probs
        .iter()
        .enumerate()
        .map(|(n, p)| n as f64 * p)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sideband {
    Red,
    Blue,
    Carrier,
}

/// Fixed-duration probe used for sideband thermometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidebandScanModel {
    /// Seconds.
    pub pulse_duration: f64,
    /// Carrier Rabi frequency, rad/s.
    pub rabi_carrier: f64,
    pub eta: f64,
    /// Mode angular frequency, rad/s.
    pub mode_freq: f64,
}

impl SidebandScanModel {
    pub fn new(pulse_duration: f64, rabi_carrier: f64, eta: f64, mode_freq: f64) -> Result<Self> {
        if !(pulse_duration > 0.0 && rabi_carrier > 0.0 && eta > 0.0 && mode_freq > 0.0) {
            return Err(Error::domain("sideband scan model parameters must all be positive"));
        }
        Ok(SidebandScanModel {
            pulse_duration,
            rabi_carrier,
            eta,
            mode_freq,
        })
    }

    /// Carrier Rabi frequency chosen so the probe is a π-pulse on the
    /// `n = 0 -> 1` blue sideband.
    pub fn pi_pulse_on_blue(pulse_duration: f64, eta: f64, mode_freq: f64) -> Result<Self> {
        let rabi = std::f64::consts::PI / (eta * pulse_duration);
        Self::new(pulse_duration, rabi, eta, mode_freq)
    }

    fn rabi_for(&self, n: usize, sideband: Sideband) -> f64 {
        match sideband {
            Sideband::Red => self.eta * self.rabi_carrier * (n as f64).sqrt(),
            Sideband::Blue => self.eta * self.rabi_carrier * ((n + 1) as f64).sqrt(),
            Sideband::Carrier => self.rabi_carrier,
        }
    }
}

/// Two-level Rabi lineshape `Ω²/W² · sin²(W t / 2)`, `W = sqrt(Ω² + δ²)`.
pub fn rabi_lineshape(rabi: f64, detuning: f64, duration: f64) -> f64 {
    let w2 = rabi * rabi + detuning * detuning;
    if w2 == 0.0 {
        return 0.0;
    }
    let s = (0.5 * w2.sqrt() * duration).sin();
    rabi * rabi / w2 * s * s
}

/// Thermally averaged excitation probability at detuning `detuning`
/// (rad/s) from the chosen resonance.
pub fn sideband_excitation(
    dist: &FockDistribution,
    model: &SidebandScanModel,
    detuning: f64,
    sideband: Sideband,
) -> f64 {
    dist.probs
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 0.0)
        .map(|(n, p)| p * rabi_lineshape(model.rabi_for(n, sideband), detuning, model.pulse_duration))
        .sum()
}

/// Excitation at a Raman detuning measured from the carrier: negative
/// detunings probe the red sideband, non-negative ones the blue sideband.
pub fn scan_excitation(dist: &FockDistribution, model: &SidebandScanModel, raman_detuning: f64) -> f64 {
    if raman_detuning < 0.0 {
        sideband_excitation(dist, model, raman_detuning + model.mode_freq, Sideband::Red)
    } else {
        sideband_excitation(dist, model, raman_detuning - model.mode_freq, Sideband::Blue)
    }
}

/// Thermal-state thermometry: `nbar = r / (1 - r)`.
pub fn nbar_from_ratio(r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::domain(format!(
            "sideband ratio must lie in [0, 1) for a thermal state, got {r}"
        )));
    }
    Ok(r / (1.0 - r))
}
