//! Clock-qubit coherence bookkeeping through cooling cycles and the Ramsey
//! fringe that reads it out.

use std::f64::consts::{FRAC_PI_2, PI};

use super::scatter::{light_shift_phase, scattering_per_cycle, ScatterParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitCoherence {
    /// Fringe contrast relative to a perfect superposition, in [0, 1].
    pub contrast: f64,
    /// Accumulated deterministic phase, rad.
    pub phase: f64,
    /// Probability pumped out of the clock manifold.
    pub population_leak: f64,
}

impl Default for QubitCoherence {
    fn default() -> Self {
        QubitCoherence {
            contrast: 1.0,
            phase: 0.0,
            population_leak: 0.0,
        }
    }
}

impl QubitCoherence {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.contrast) || !(0.0..=1.0).contains(&self.population_leak) {
            return Err(Error::domain("contrast and leak must lie in [0, 1]"));
        }
        if self.contrast > 1.0 - self.population_leak + 1e-12 {
            return Err(Error::domain("contrast exceeds the population left in the clock manifold"));
        }
        Ok(())
    }
}

/// Everything a cooling cycle does to the logic ion.
#[derive(Debug, Clone, PartialEq)]
pub struct GapContext {
    pub scatter: ScatterParams,
    /// Per-cycle contrast loss from off-resonant Raman processes.
    pub eps_raman: f64,
    /// Differential light shift during the repump, rad/s.
    pub delta_q: f64,
    /// Repump duration τ_σ, seconds.
    pub tau_sigma: f64,
    pub track_leakage: bool,
}

impl GapContext {
    /// Chooses `eps_raman` so one full cycle removes `eps_total` of the
    /// contrast given the scattering in `self.scatter`.
    pub fn calibrate_eps_raman(&mut self, eps_total: f64) -> Result<()> {
        let r = scattering_per_cycle(&self.scatter).decohering;
        if !(0.0..1.0).contains(&eps_total) || r > eps_total {
            return Err(Error::domain(format!(
                "cannot reach per-cycle loss {eps_total}: scattering alone gives {r}"
            )));
        }
        self.eps_raman = 1.0 - (1.0 - eps_total) / (1.0 - r);
        Ok(())
    }

    /// Contrast surviving one full cooling cycle.
    pub fn cycle_factor(&self) -> f64 {
        (1.0 - scattering_per_cycle(&self.scatter).decohering) * (1.0 - self.eps_raman)
    }

    /// Contrast surviving one repump pulse on its own.
    pub fn repump_factor(&self) -> f64 {
        let b = scattering_per_cycle(&self.scatter);
        1.0 - b.r_sigma * (1.0 - self.scatter.elastic_fraction)
    }
}

fn leak_step(q: &mut QubitCoherence, scattered: f64, enabled: bool) {
    if enabled {
        q.population_leak = 1.0 - (1.0 - q.population_leak) * (1.0 - scattered.clamp(0.0, 1.0));
    }
}

/// One cooling cycle (red-sideband pulse plus repump) seen by the memory
/// qubit.
pub fn apply_cooling_decoherence(q: QubitCoherence, ctx: &GapContext) -> QubitCoherence {
    let b = scattering_per_cycle(&ctx.scatter);
    let mut out = q;
    out.contrast = q.contrast * (1.0 - b.decohering) * (1.0 - ctx.eps_raman);
    out.phase = q.phase + light_shift_phase(ctx.delta_q, ctx.tau_sigma);
    leak_step(&mut out, b.decohering, ctx.track_leakage);
    out
}

/// A repump pulse with no sideband pulse.
pub fn apply_repump_only(q: QubitCoherence, ctx: &GapContext) -> QubitCoherence {
    let b = scattering_per_cycle(&ctx.scatter);
    let lost = b.r_sigma * (1.0 - ctx.scatter.elastic_fraction);
    let mut out = q;
    out.contrast = q.contrast * (1.0 - lost);
    out.phase = q.phase + light_shift_phase(ctx.delta_q, ctx.tau_sigma);
    leak_step(&mut out, lost, ctx.track_leakage);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapOp {
    CoolingCycle,
    RepumpOnly,
}

/// Fractional rotation-angle errors of the two π/2 pulses.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PulseErrors {
    pub first: f64,
    pub second: f64,
}

/// `P(↓)(φ) = offset + amplitude · cos(φ + phase)` for analysis phase φ,
/// starting from the qubit in |↑>.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamseyFringe {
    pub offset: f64,
    pub amplitude: f64,
    pub phase: f64,
    pub coherence: QubitCoherence,
}

impl RamseyFringe {
    pub fn probability(&self, analysis_phase: f64) -> f64 {
        self.offset + self.amplitude * (analysis_phase + self.phase).cos()
    }
}

/// Ramsey experiment with `gap_ops` inserted between the π/2 pulses.
/// `detuning * gap_time` adds to the accumulated phase.
pub fn ramsey_sequence(
    q0: QubitCoherence,
    pulses: PulseErrors,
    gap_ops: &[GapOp],
    ctx: &GapContext,
    detuning: f64,
    gap_time: f64,
) -> RamseyFringe {
    let q = gap_ops.iter().fold(q0, |q, op| match op {
        GapOp::CoolingCycle => apply_cooling_decoherence(q, ctx),
        GapOp::RepumpOnly => apply_repump_only(q, ctx),
    });
    let theta1 = FRAC_PI_2 * (1.0 + pulses.first);
    let theta2 = FRAC_PI_2 * (1.0 + pulses.second);
    let total_phase = q.phase + detuning * gap_time;
    let wrapped = (total_phase + PI).rem_euclid(2.0 * PI) - PI;
    RamseyFringe {
        offset: 0.5 * (1.0 - theta1.cos() * theta2.cos()),
        amplitude: 0.5 * q.contrast * theta1.sin() * theta2.sin(),
        phase: wrapped,
        coherence: q,
    }
}
