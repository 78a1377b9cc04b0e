//! Rate-equation model of the memory ion under the far-detuned σ⁻ repump
//! light, and the clock-qubit light shift it produces.
//!
//! Ground sublevels of S1/2 are `|F, M>` for both hyperfine manifolds. Each
//! hyperfine component of S1/2 → P1/2 is driven off-resonantly; excited
//! populations are eliminated adiabatically so the dynamics reduce to
//! sublevel-to-sublevel transfer rates. The clock coherence between
//! `|F_low, 0>` (|↑>) and `|F_high, 0>` (|↓>) precesses at the differential
//! light shift and decays at the mean scattering rate of the two states.

use std::f64::consts::PI;

use super::angular::{branching_ratio, line_strength};
use crate::constants::{AtomicConstants, HyperfineComponent};
use crate::error::{Error, Result};
use crate::units::{PLANCK, SPEED_OF_LIGHT};

/// Polarization as the change in `M` on absorption.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    SigmaMinus,
    Pi,
    SigmaPlus,
}

impl Polarization {
    fn two_q(self) -> i32 {
        match self {
            Polarization::SigmaMinus => -2,
            Polarization::Pi => 0,
            Polarization::SigmaPlus => 2,
        }
    }
}

/// Ground sublevel `|F, M>`, both doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sublevel {
    pub two_f: i32,
    pub two_m: i32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PumpingModel {
    /// W/m².
    pub intensity: f64,
    /// Laser frequency relative to the coolant S→P line, rad/s.
    pub laser_detuning: f64,
    pub polarization: Polarization,
    /// Decay rate, rad/s.
    pub gamma: f64,
    pub wavelength: f64,
    pub two_nuclear_spin: i32,
    pub components: Vec<HyperfineComponent>,
    /// Initial population of every sublevel, in [`PumpingModel::sublevels`]
    /// order, before the first π/2 pulse.
    pub zeeman_fill: Vec<f64>,
    pub elastic_fraction: f64,
}

/// Output of [`pumping_scan`].
#[derive(Debug, Clone, PartialEq)]
pub struct PumpingScan {
    pub times: Vec<f64>,
    /// Probability of ending in the upper-F manifold after the second π/2.
    pub p_upper: Vec<f64>,
    /// Baseline rate α: initial pumping rate from the spectator states of
    /// the lower manifold into the upper one, 1/s.
    pub alpha: f64,
    /// Differential light shift Δq of the clock states, rad/s.
    pub delta_q: f64,
    /// Oscillation amplitude A: half the clock population after preparation.
    pub amplitude: f64,
    /// Decay of the clock coherence, 1/s.
    pub beta: f64,
    /// Largest deviation of total population from one over all steps.
    pub max_population_error: f64,
}

impl PumpingModel {
    /// σ⁻ light resonant with the coolant line, memory ion prepared in the
    /// lower manifold with `clock_fraction` in `M = 0` and the rest spread
    /// uniformly over the other sublevels.
    pub fn from_constants(c: &AtomicConstants, intensity: f64, clock_fraction: f64) -> Self {
        let mut m = PumpingModel {
            intensity,
            laser_detuning: 0.0,
            polarization: Polarization::SigmaMinus,
            gamma: c.gamma,
            wavelength: c.wavelength,
            two_nuclear_spin: c.two_nuclear_spin,
            components: c.components.clone(),
            zeeman_fill: Vec::new(),
            elastic_fraction: 0.0,
        };
        m.zeeman_fill = m.lower_manifold_fill(clock_fraction);
        m
    }

    fn two_f_low(&self) -> i32 {
        self.two_nuclear_spin - 1
    }

    fn two_f_high(&self) -> i32 {
        self.two_nuclear_spin + 1
    }

    /// Lower manifold first, `M` ascending within each manifold.
    pub fn sublevels(&self) -> Vec<Sublevel> {
        [self.two_f_low(), self.two_f_high()]
            .into_iter()
            .flat_map(|two_f| (-two_f..=two_f).step_by(2).map(move |two_m| Sublevel { two_f, two_m }))
            .collect()
    }

    fn index_of(&self, s: Sublevel) -> usize {
        self.sublevels()
            .iter()
            .position(|x| *x == s)
            .expect("sublevel exists")
    }

    pub fn clock_up(&self) -> usize {
        self.index_of(Sublevel { two_f: self.two_f_low(), two_m: 0 })
    }

    pub fn clock_down(&self) -> usize {
        self.index_of(Sublevel { two_f: self.two_f_high(), two_m: 0 })
    }

    pub fn lower_manifold_fill(&self, clock_fraction: f64) -> Vec<f64> {
        let levels = self.sublevels();
        let spectators = self.two_f_low() as f64; // 2F+1 - 1
        levels
            .iter()
            .map(|s| match (s.two_f == self.two_f_low(), s.two_m == 0) {
                (true, true) => clock_fraction,
                (true, false) => (1.0 - clock_fraction) / spectators,
                _ => 0.0,
            })
            .collect()
    }

    pub fn saturation_intensity(&self) -> f64 {
        PI * PLANCK * SPEED_OF_LIGHT * self.gamma / (3.0 * self.wavelength.powi(3))
    }

    fn component_detuning(&self, c: &HyperfineComponent) -> f64 {
        self.laser_detuning - c.offset
    }

    /// Per-component drive: (strength, detuning, scattering rate, light shift)
    /// for ground sublevel `s`.
    fn drives(&self, s: Sublevel) -> impl Iterator<Item = (i32, f64, f64)> + '_ {
        let sat = self.intensity / self.saturation_intensity();
        let two_mp = s.two_m + self.polarization.two_q();
        self.components
            .iter()
            .filter(move |c| 2 * c.f_s as i32 == s.two_f)
            .filter_map(move |c| {
                let two_fp = 2 * c.f_p as i32;
                if two_mp.abs() > two_fp {
                    return None;
                }
                let strength = line_strength(1, 1, self.two_nuclear_spin, s.two_f, s.two_m, two_fp, two_mp);
                if strength == 0.0 {
                    return None;
                }
                let d = self.component_detuning(c);
                let s_c = strength * sat;
                let g = self.gamma;
                let rate = 0.5 * g * s_c / (1.0 + s_c + 4.0 * d * d / (g * g));
                // Ω² = Γ² s / 2
                let shift = 0.5 * g * g * s_c * d / (4.0 * d * d + g * g);
                Some((two_fp, rate, shift))
            })
    }

    /// AC Stark shift of sublevel `s`, rad/s.
    pub fn light_shift(&self, s: Sublevel) -> f64 {
        self.drives(s).map(|(_, _, shift)| shift).sum()
    }

    /// Transfer-rate matrix `rates[i][j]` (1/s) from sublevel `i` to `j`,
    /// including `i == j` (scattering that returns to the same sublevel).
    pub fn transfer_rates(&self) -> Vec<Vec<f64>> {
        let levels = self.sublevels();
        let mut rates = vec![vec![0.0; levels.len()]; levels.len()];
        for (i, &s) in levels.iter().enumerate() {
            let two_mp = s.two_m + self.polarization.two_q();
            for (two_fp, rate, _) in self.drives(s) {
                for (j, t) in levels.iter().enumerate() {
                    let b = branching_ratio(1, 1, self.two_nuclear_spin, two_fp, two_mp, t.two_f, t.two_m);
                    rates[i][j] += rate * b;
                }
            }
        }
        rates
    }

    /// Differential light shift of the clock transition, rad/s.
    pub fn delta_q(&self) -> f64 {
        let levels = self.sublevels();
        self.light_shift(levels[self.clock_up()]) - self.light_shift(levels[self.clock_down()])
    }

    /// Intensity at which the clock light shift equals `delta_q`. The shift is
    /// linear in intensity far below saturation.
    pub fn intensity_for_delta_q(&self, delta_q: f64) -> Result<f64> {
        let probe = PumpingModel {
            intensity: 1.0,
            ..self.clone()
        };
        let per_unit = probe.delta_q();
        if per_unit == 0.0 {
            return Err(Error::domain("light shift does not depend on intensity"));
        }
        Ok(delta_q / per_unit)
    }

    /// Repump-scattering weight `h`: logic-ion scattering per photon scattered
    /// by the coolant, in units of `(Γ / 2Δ_I)²`, for a memory ion split
    /// evenly between the clock states. The coolant reference is the resonant
    /// σ⁻ transition out of its `M_J = +1/2` state.
    pub fn repump_h_factor(&self) -> f64 {
        let delta_i = self
            .components
            .iter()
            .map(|c| c.offset.abs())
            .fold(f64::INFINITY, f64::min);
        let coolant = line_strength(1, 1, 0, 1, 1, 1, 1 + self.polarization.two_q());
        let levels = self.sublevels();
        let mut h = 0.0;
        for idx in [self.clock_up(), self.clock_down()] {
            let s = levels[idx];
            let two_mp = s.two_m + self.polarization.two_q();
            for c in self.components.iter().filter(|c| 2 * c.f_s as i32 == s.two_f) {
                let two_fp = 2 * c.f_p as i32;
                let strength = line_strength(1, 1, self.two_nuclear_spin, s.two_f, s.two_m, two_fp, two_mp);
                let ratio = delta_i / self.component_detuning(c);
                h += 0.5 * strength * ratio * ratio;
            }
        }
        h / coolant
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.sublevels().len();
        if self.zeeman_fill.len() != n {
            return Err(Error::domain(format!(
                "zeeman_fill has {} entries, expected {n}",
                self.zeeman_fill.len()
            )));
        }
        if self.zeeman_fill.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::domain("zeeman_fill has negative populations"));
        }
        let total: f64 = self.zeeman_fill.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::domain(format!("zeeman_fill sums to {total}, not 1")));
        }
        if !(self.intensity >= 0.0 && self.gamma > 0.0 && self.wavelength > 0.0) {
            return Err(Error::domain("intensity must be >= 0, gamma and wavelength > 0"));
        }
        if !(0.0..=1.0).contains(&self.elastic_fraction) {
            return Err(Error::domain("elastic_fraction must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// State: sublevel populations followed by Re/Im of the clock coherence.
struct RateSystem {
    rates: Vec<Vec<f64>>,
    out_rate: Vec<f64>,
    delta_q: f64,
    beta: f64,
}

impl RateSystem {
    fn derivative(&self, y: &[f64], dy: &mut [f64]) {
        let n = self.out_rate.len();
        for j in 0..n {
            dy[j] = -self.out_rate[j] * y[j];
        }
        for (i, row) in self.rates.iter().enumerate() {
            let pi = y[i];
            if pi == 0.0 {
                continue;
            }
            for (j, r) in row.iter().enumerate() {
                dy[j] += r * pi;
            }
        }
        let (re, im) = (y[n], y[n + 1]);
        dy[n] = -self.beta * re - self.delta_q * im;
        dy[n + 1] = self.delta_q * re - self.beta * im;
    }

    fn rk4(&self, y: &mut [f64], h: f64, k: &mut [Vec<f64>; 5]) {
        let len = y.len();
        let [k1, k2, k3, k4, tmp] = k;
        self.derivative(y, k1);
        for i in 0..len {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        self.derivative(tmp, k2);
        for i in 0..len {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        self.derivative(tmp, k3);
        for i in 0..len {
            tmp[i] = y[i] + h * k3[i];
        }
        self.derivative(tmp, k4);
        for i in 0..len {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
}

/// Ramsey-bracketed repump scan: π/2, repump for each duration in `times`,
/// π/2, then the upper-manifold population. Fixed-step RK4 with step at most
/// `1 / (50 · fastest rate)`.
pub fn pumping_scan(model: &PumpingModel, times: &[f64]) -> Result<PumpingScan> {
    model.validate()?;
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|t| *t < 0.0) {
        return Err(Error::domain("duration grid must be ascending and non-negative"));
    }
    let levels = model.sublevels();
    let n = levels.len();
    let up = model.clock_up();
    let down = model.clock_down();

    let rates = model.transfer_rates();
    let out_rate: Vec<f64> = rates.iter().map(|r| r.iter().sum()).collect();
    let delta_q = model.delta_q();
    let beta = (1.0 - model.elastic_fraction) * 0.5 * (out_rate[up] + out_rate[down]);

    let alpha: f64 = levels
        .iter()
        .enumerate()
        .filter(|(i, s)| s.two_f == model.two_f_low() && *i != up)
        .map(|(i, _)| {
            let to_upper: f64 = levels
                .iter()
                .enumerate()
                .filter(|(_, t)| t.two_f == model.two_f_high())
                .map(|(j, _)| rates[i][j])
                .sum();
            model.zeeman_fill[i] * to_upper
        })
        .sum();

    // first π/2 pulse acts on the clock pair only
    let mut y = vec![0.0; n + 2];
    y[..n].copy_from_slice(&model.zeeman_fill);
    let (pu, pd) = (model.zeeman_fill[up], model.zeeman_fill[down]);
    y[up] = 0.5 * (pu + pd);
    y[down] = 0.5 * (pu + pd);
    y[n] = 0.5 * (pu - pd);
    let amplitude = 0.5 * (pu - pd);

    let fastest = out_rate
        .iter()
        .copied()
        .chain([delta_q.abs(), beta])
        .fold(0.0, f64::max);
    let h_max = if fastest > 0.0 { 1.0 / (50.0 * fastest) } else { f64::INFINITY };

    let sys = RateSystem {
        rates,
        out_rate,
        delta_q,
        beta,
    };
    let readout = |y: &[f64]| -> f64 {
        let upper: f64 = levels
            .iter()
            .enumerate()
            .filter(|(i, s)| s.two_f == model.two_f_high() && *i != down)
            .map(|(i, _)| y[i])
            .sum();
        upper + 0.5 * (y[up] + y[down]) + y[n]
    };

    let mut k: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; n + 2]);
    let mut t_now = 0.0;
    let mut p_upper = Vec::with_capacity(times.len());
    let mut max_err: f64 = 0.0;
    for &t in times {
        let span = t - t_now;
        if span > 0.0 {
            let steps = if h_max.is_finite() { (span / h_max).ceil().max(1.0) as usize } else { 1 };
            let h = span / steps as f64;
            for _ in 0..steps {
                sys.rk4(&mut y, h, &mut k);
                let total: f64 = y[..n].iter().sum();
                max_err = max_err.max((total - 1.0).abs());
            }
            t_now = t;
        }
        p_upper.push(readout(&y));
    }

    Ok(PumpingScan {
        times: times.to_vec(),
        p_upper,
        alpha,
        delta_q,
        amplitude,
        beta,
        max_population_error: max_err,
    })
}

/// The empirical repump-scan curve
/// `(1 - e^{-α t}) + A [1 + e^{-β t} cos(Δq t)]`.
pub fn repump_curve(alpha: f64, amplitude: f64, beta: f64, delta_q: f64, t: f64) -> f64 {
    (1.0 - (-alpha * t).exp()) + amplitude * (1.0 + (-beta * t).exp() * (delta_q * t).cos())
}
