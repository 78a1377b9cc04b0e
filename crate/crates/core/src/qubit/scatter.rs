//! Photon-scattering estimates per cooling cycle, light-shift phase,
//! addressing crosstalk and the gate-error budget.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterParams {
    /// P1/2 decay rate Γ, rad/s.
    pub gamma: f64,
    /// Raman detuning Δ from the coolant S→P line, rad/s.
    pub delta: f64,
    /// Effective (smallest) isotope shift Δ_I, rad/s.
    pub delta_i: f64,
    pub g_factor: f64,
    pub h_factor: f64,
    /// Coolant Lamb-Dicke parameter of the cooled mode.
    pub eta: f64,
    /// Share of scattering that leaves the qubit coherence intact.
    pub elastic_fraction: f64,
    pub photons_per_repump: f64,
    /// Replaces the repump term with a measured per-pulse value.
    pub r_sigma_override: Option<f64>,
}

impl ScatterParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.delta > 0.0 && self.delta_i > 0.0) {
            return Err(Error::domain("gamma, delta and delta_I must be positive"));
        }
        if !(self.g_factor > 0.0 && self.h_factor > 0.0 && self.eta > 0.0) {
            return Err(Error::domain("g, h and eta must be positive"));
        }
        if !(0.0..=1.0).contains(&self.elastic_fraction) {
            return Err(Error::domain("elastic_fraction must lie in [0, 1]"));
        }
        if !(self.photons_per_repump >= 0.0) {
            return Err(Error::domain("photons_per_repump must be >= 0"));
        }
        Ok(())
    }
}

/// Logic-ion photons scattered per cooling cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterBudget {
    pub r_rsb: f64,
    pub r_sigma: f64,
    pub r_total: f64,
    /// Part of `r_total` that destroys coherence.
    pub decohering: f64,
}

pub fn scattering_per_cycle(p: &ScatterParams) -> ScatterBudget {
    let r_rsb = p.g_factor * PI * p.gamma / (p.eta * p.delta);
    let r_sigma = p.r_sigma_override.unwrap_or_else(|| {
        let x = p.gamma / (2.0 * p.delta_i);
        p.h_factor * x * x * p.photons_per_repump
    });
    let r_total = r_rsb + r_sigma;
    ScatterBudget {
        r_rsb,
        r_sigma,
        r_total,
        decohering: r_total * (1.0 - p.elastic_fraction),
    }
}

/// Phase (rad) picked up under a differential light shift `delta_q` (rad/s).
pub fn light_shift_phase(delta_q: f64, duration: f64) -> f64 {
    delta_q * duration
}

/// Logic-ion scattering per repump pulse inferred from the spectator
/// pumping rate: `2 α τ_σ`.
pub fn repump_scatter_rate(alpha: f64, tau_sigma: f64) -> Result<f64> {
    if !(alpha >= 0.0 && tau_sigma >= 0.0) {
        return Err(Error::domain("alpha and tau_sigma must be >= 0"));
    }
    Ok(2.0 * alpha * tau_sigma)
}

/// Lower bound on the excitation ratio for a Gaussian beam centred on one
/// ion with its neighbour at distance `separation`.
pub fn addressing_crosstalk(separation: f64, waist: f64) -> Result<f64> {
    if !(waist > 0.0) {
        return Err(Error::domain(format!("beam waist must be positive, got {waist}")));
    }
    if !(separation >= 0.0) {
        return Err(Error::domain(format!("separation must be >= 0, got {separation}")));
    }
    Ok((-2.0 * separation * separation / (waist * waist)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateErrorBudget {
    pub gamma_thermal: f64,
    pub lower_bound: f64,
}

/// Thermal contribution `0.3 π² η⁴ n̄(n̄+1)` plus `N ε` from the cooling.
pub fn gate_error_budget(eta: f64, nbar: f64, cycles: f64, eps: f64) -> Result<GateErrorBudget> {
    if [eta, nbar, cycles, eps].iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::domain("gate budget inputs must be >= 0"));
    }
    let gamma_thermal = 0.3 * PI * PI * eta.powi(4) * nbar * (nbar + 1.0);
    Ok(GateErrorBudget {
        gamma_thermal,
        lower_bound: gamma_thermal + cycles * eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    pub(crate) fn reference_params() -> ScatterParams {
        ScatterParams {
            gamma: TAU * 20.7e6,
            delta: TAU * 30e9,
            delta_i: TAU * 781.2545e6,
            g_factor: 1.0,
            h_factor: 1.0,
            eta: 0.1,
            elastic_fraction: 0.0,
            photons_per_repump: 3.0,
            r_sigma_override: None,
        }
    }

    #[test]
    fn raman_term_direct_evaluation() {
        let b = scattering_per_cycle(&reference_params());
        let direct = PI * 20.7e6 / (0.1 * 30e9);
        assert!((b.r_rsb - direct).abs() < 1e-15);
        assert!((b.r_rsb - 0.0217).abs() < 1e-4);
        assert_eq!(b.r_total, b.r_rsb + b.r_sigma);
        assert_eq!(b.decohering, b.r_total);
    }

    #[test]
    fn far_detuning_kills_raman_term() {
        let p = ScatterParams { delta: 1e30, ..reference_params() };
        assert!(scattering_per_cycle(&p).r_rsb < 1e-15);
    }

    #[test]
    fn monotone_in_detunings() {
        let base = scattering_per_cycle(&reference_params());
        let more = scattering_per_cycle(&ScatterParams { delta: TAU * 60e9, ..reference_params() });
        assert!(more.r_total < base.r_total);
        let more = scattering_per_cycle(&ScatterParams { delta_i: TAU * 2e9, ..reference_params() });
        assert!(more.r_total < base.r_total);
    }

    #[test]
    fn elastic_share_does_not_decohere() {
        let b = scattering_per_cycle(&ScatterParams { elastic_fraction: 0.25, ..reference_params() });
        assert!((b.decohering - 0.75 * b.r_total).abs() < 1e-18);
    }

    #[test]
    fn override_replaces_repump_term() {
        let b = scattering_per_cycle(&ScatterParams { r_sigma_override: Some(4.2e-4), ..reference_params() });
        assert_eq!(b.r_sigma, 4.2e-4);
    }

    #[test]
    fn light_shift() {
        let phi = light_shift_phase(TAU * 623.0, 10e-6);
        assert!((phi - 0.039144).abs() < 1e-6);
        assert_eq!((phi * 1e3).round(), 39.0);
        assert_eq!(light_shift_phase(TAU * 623.0, 0.0), 0.0);
        assert!((light_shift_phase(TAU * 623.0, 1.0 / 623.0) - TAU).abs() < 1e-12);
    }

    #[test]
    fn repump_rate_from_alpha() {
        assert!((repump_scatter_rate(21.0, 10e-6).unwrap() - 4.2e-4).abs() < 1e-15);
        assert_eq!(repump_scatter_rate(0.0, 10e-6).unwrap(), 0.0);
        let a = repump_scatter_rate(21.0, 10e-6).unwrap();
        let b = repump_scatter_rate(21.0, 20e-6).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-18);
        assert!(repump_scatter_rate(-1.0, 1e-6).is_err());
    }

    #[test]
    fn crosstalk_values() {
        assert_eq!(addressing_crosstalk(0.0, 1.0).unwrap(), 1.0);
        assert!((addressing_crosstalk(1.0, 1.0).unwrap() - 0.1353352832366127).abs() < 1e-15);
        assert!((addressing_crosstalk(2.0, 1.0).unwrap() - 3.354626279025119e-4).abs() < 1e-16);
        assert!(addressing_crosstalk(1.0, 0.0).is_err());
    }

    #[test]
    fn gate_budget_values() {
        assert_eq!(gate_error_budget(0.1, 0.0, 0.0, 0.0).unwrap().gamma_thermal, 0.0);
        let b = gate_error_budget(0.1, 1.0, 0.0, 0.0).unwrap();
        assert!((b.gamma_thermal - 5.92e-4).abs() < 1e-6);
        let b = gate_error_budget(0.1, 0.07, 10.0, 1e-4).unwrap();
        let gt = 0.3 * PI * PI * 1e-4 * 0.07 * 1.07;
        assert!((b.lower_bound - (gt + 1e-3)).abs() < 1e-15);
        assert!((b.lower_bound - 1.022e-3).abs() < 1e-6);
    }
}
