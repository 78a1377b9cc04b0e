//! Pulsed Raman sideband cooling of one normal mode: red-sideband π-pulse,
//! optical repump with recoil, and ambient heating, all acting on the
//! diagonal Fock distribution.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::motion::FockDistribution;

#[derive(Debug, Clone, PartialEq)]
pub struct CoolingParams {
    /// Lamb-Dicke parameter of the coolant ion in the addressed mode.
    pub eta: f64,
    /// Carrier Rabi frequency of the Raman beams, rad/s.
    pub rabi_carrier: f64,
    /// Fock level whose red-sideband π time the pulse is tuned to.
    pub pulse_target_n: u32,
    /// Repump pulse length τ_σ, seconds.
    pub repump_duration: f64,
    pub photons_per_repump: f64,
    pub eta_recoil: f64,
    /// Ambient heating, quanta per second.
    pub heating_rate: f64,
    /// Seconds per cycle over which ambient heating acts.
    pub cycle_wall_time: f64,
    /// Every level `n >= 1` is fully transferred, as if the π time were
    /// retuned per level.
    pub idealized: bool,
    /// Per-cycle π-time targets. Cycle `k` uses `retune_schedule[k]` and
    /// falls back to `pulse_target_n` once the schedule runs out.
    pub retune_schedule: Vec<u32>,
}

impl Default for CoolingParams {
    fn default() -> Self {
        CoolingParams {
            eta: 0.1,
            rabi_carrier: 0.0,
            pulse_target_n: 1,
            repump_duration: 10e-6,
            photons_per_repump: 3.0,
            eta_recoil: 0.1,
            heating_rate: 0.0,
            cycle_wall_time: 0.0,
            idealized: false,
            retune_schedule: Vec::new(),
        }
    }
}

impl CoolingParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("eta", self.eta),
            ("rabi_carrier", self.rabi_carrier),
            ("repump_duration", self.repump_duration),
            ("photons_per_repump", self.photons_per_repump),
            ("eta_recoil", self.eta_recoil),
            ("heating_rate", self.heating_rate),
            ("cycle_wall_time", self.cycle_wall_time),
        ];
        for (name, v) in fields {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("cooling parameter {name} must be >= 0, got {v}")));
            }
        }
        if self.pulse_target_n == 0 || self.retune_schedule.contains(&0) {
            return Err(Error::domain("pulse target level must be >= 1"));
        }
        Ok(())
    }

    pub fn target_for_cycle(&self, cycle: usize) -> u32 {
        self.retune_schedule
            .get(cycle)
            .copied()
            .unwrap_or(self.pulse_target_n)
    }

    /// Mean-occupation increase from recoil per repump pulse.
    pub fn recoil_kick(&self) -> f64 {
        self.photons_per_repump * self.eta_recoil * self.eta_recoil
    }

    fn for_cycle(&self, cycle: usize) -> CoolingParams {
        CoolingParams {
            pulse_target_n: self.target_for_cycle(cycle),
            ..self.clone()
        }
    }
}

/// Fraction of level `n` moved to `n - 1` by the red-sideband pulse.
pub fn transfer_probability(n: usize, params: &CoolingParams) -> f64 {
    if n == 0 {
        0.0
    } else if params.idealized {
        1.0
    } else {
        let x = (n as f64 / params.pulse_target_n as f64).sqrt();
        (FRAC_PI_2 * x).sin().powi(2)
    }
}

/// Applies the red-sideband π-pulse. Returns the new distribution and the
/// total transferred (spin-flipped) fraction.
pub fn red_sideband_map(dist: &FockDistribution, params: &CoolingParams) -> (FockDistribution, f64) {
    let p = dist.probs();
    let mut out = p.to_vec();
    let mut moved = 0.0;
    for n in 1..p.len() {
        let m = p[n] * transfer_probability(n, params);
        out[n] -= m;
        out[n - 1] += m;
        moved += m;
    }
    (FockDistribution::from_probs_unchecked(out), moved)
}

/// Nearest-neighbour diffusion that raises the mean occupation by `kick`.
/// From level `n` the up/down rates are `kick (n+1)` and `kick n`; the kick
/// is split into sub-steps so every step is a valid stochastic map.
pub fn diffuse(dist: &FockDistribution, kick: f64) -> FockDistribution {
    if kick <= 0.0 {
        return dist.clone();
    }
    let n_max = dist.n_max();
    let steps = (kick * (2 * n_max + 1) as f64 / 0.5).ceil().max(1.0) as usize;
    let k = kick / steps as f64;
    let mut cur = dist.probs().to_vec();
    let mut next = vec![0.0; cur.len()];
    for _ in 0..steps {
        next.iter_mut().for_each(|x| *x = 0.0);
        for (n, &pn) in cur.iter().enumerate() {
            if pn == 0.0 {
                continue;
            }
            let up = if n < n_max { k * (n + 1) as f64 } else { 0.0 };
            let down = k * n as f64;
            next[n] += pn * (1.0 - up - down);
            if up > 0.0 {
                next[n + 1] += pn * up;
            }
            if down > 0.0 {
                next[n - 1] += pn * down;
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    FockDistribution::from_probs_unchecked(cur)
}

/// Optical repump: the spin returns to the cooled state and recoil diffuses
/// the motional distribution.
pub fn repump_map(dist: &FockDistribution, params: &CoolingParams) -> FockDistribution {
    diffuse(dist, params.recoil_kick())
}

/// One full cycle with the schedule entry for `cycle` ignored; uses
/// `params.pulse_target_n` as given.
pub fn cooling_cycle(dist: &FockDistribution, params: &CoolingParams) -> FockDistribution {
    let (cooled, _) = red_sideband_map(dist, params);
    let repumped = repump_map(&cooled, params);
    diffuse(&repumped, params.heating_rate * params.cycle_wall_time)
}

/// `cycles + 1` states, starting with `initial`. Cycle `k` (0-based) uses
/// the retune schedule entry `k`.
pub fn run_cooling(initial: &FockDistribution, params: &CoolingParams, cycles: usize) -> Vec<FockDistribution> {
    let mut out = Vec::with_capacity(cycles + 1);
    out.push(initial.clone());
    for k in 0..cycles {
        let next = cooling_cycle(out.last().expect("non-empty"), &params.for_cycle(k));
        out.push(next);
    }
    out
}
