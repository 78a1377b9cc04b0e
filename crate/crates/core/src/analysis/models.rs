//! The four model families, each with its analytic gradient.

use std::f64::consts::TAU;

use super::lm::FitModel;

/// `L(δ, Ω) = Ω²/W² · sin²(W t/2)` with its partial derivatives in δ and Ω.
fn rabi_with_partials(delta: f64, rabi: f64, t: f64) -> (f64, f64, f64) {
    let w2 = rabi * rabi + delta * delta;
    if w2 == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let w = w2.sqrt();
    let half = 0.5 * w * t;
    let s = half.sin().powi(2);
    let ds_dw = 0.5 * t * (w * t).sin();
    let common = ds_dw / (w2 * w) - 2.0 * s / (w2 * w2);
    let l = rabi * rabi * s / w2;
    let dl_ddelta = rabi * rabi * delta * common;
    let dl_drabi = 2.0 * rabi * s / w2 + rabi.powi(3) * common;
    (l, dl_ddelta, dl_drabi)
}

/// Red and blue sideband lineshapes fitted together. Points with `x < 0`
/// belong to the red sideband. `x`, centers and widths are cyclic
/// frequencies in Hz; the width is the sideband Rabi frequency and each
/// lineshape is normalized to its resonant value so the amplitude is the
/// peak height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidebandPairModel {
    pub pulse_duration: f64,
}

impl SidebandPairModel {
    pub const PARAMS: [&'static str; 6] = [
        "red_amplitude",
        "red_center",
        "red_width",
        "blue_amplitude",
        "blue_center",
        "blue_width",
    ];

    fn offset(x: f64) -> usize {
        if x < 0.0 {
            0
        } else {
            3
        }
    }

    /// Normalized lineshape and its derivatives in (center, width).
    fn shape(&self, x: f64, center: f64, width: f64) -> (f64, f64, f64) {
        let t = self.pulse_duration;
        let (l, dl_dd, dl_dr) = rabi_with_partials(TAU * (x - center), TAU * width, t);
        let l0 = (0.5 * TAU * width * t).sin().powi(2);
        let dl0 = 0.5 * t * (TAU * width * t).sin();
        let g = l / l0;
        let dg_dc = -TAU * dl_dd / l0;
        let dg_dw = TAU * (dl_dr * l0 - l * dl0) / (l0 * l0);
        (g, dg_dc, dg_dw)
    }
}

impl FitModel for SidebandPairModel {
    fn name(&self) -> &'static str {
        "sideband"
    }
    fn param_names(&self) -> &'static [&'static str] {
        &Self::PARAMS
    }
    fn value(&self, x: f64, p: &[f64]) -> f64 {
        let o = Self::offset(x);
        p[o] * self.shape(x, p[o + 1], p[o + 2]).0
    }
    fn gradient(&self, x: f64, p: &[f64], grad: &mut [f64]) {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let o = Self::offset(x);
        let (g, dc, dw) = self.shape(x, p[o + 1], p[o + 2]);
        grad[o] = g;
        grad[o + 1] = p[o] * dc;
        grad[o + 2] = p[o] * dw;
    }
}

/// `offset + amplitude · cos(x + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FringeModel;

impl FitModel for FringeModel {
    fn name(&self) -> &'static str {
        "ramsey"
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["amplitude", "phase", "offset"]
    }
    fn value(&self, x: f64, p: &[f64]) -> f64 {
        p[2] + p[0] * (x + p[1]).cos()
    }
    fn gradient(&self, x: f64, p: &[f64], grad: &mut [f64]) {
        let (s, c) = (x + p[1]).sin_cos();
        grad[0] = c;
        grad[1] = -p[0] * s;
        grad[2] = 1.0;
    }
}

/// `a0 · (1 - epsilon)^N`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DecayModel;

impl FitModel for DecayModel {
    fn name(&self) -> &'static str {
        "decay"
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["a0", "epsilon"]
    }
    fn value(&self, n: f64, p: &[f64]) -> f64 {
        p[0] * (1.0 - p[1]).powf(n)
    }
    fn gradient(&self, n: f64, p: &[f64], grad: &mut [f64]) {
        let base = 1.0 - p[1];
        grad[0] = base.powf(n);
        grad[1] = if n == 0.0 { 0.0 } else { -p[0] * n * base.powf(n - 1.0) };
    }
}

/// `a0 · exp(-k N)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExpDecayModel;

impl FitModel for ExpDecayModel {
    fn name(&self) -> &'static str {
        "decay_exp"
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["a0", "k"]
    }
    fn value(&self, n: f64, p: &[f64]) -> f64 {
        p[0] * (-p[1] * n).exp()
    }
    fn gradient(&self, n: f64, p: &[f64], grad: &mut [f64]) {
        let e = (-p[1] * n).exp();
        grad[0] = e;
        grad[1] = -p[0] * n * e;
    }
}

/// `(1 - e^{-α t}) + A [1 + e^{-β t} cos(Δq t)]`, `t` in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RepumpModel;

impl FitModel for RepumpModel {
    fn name(&self) -> &'static str {
        "repump"
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["alpha", "amplitude", "beta", "delta_q"]
    }
    fn value(&self, t: f64, p: &[f64]) -> f64 {
        crate::qubit::repump_curve(p[0], p[1], p[2], p[3], t)
    }
    fn gradient(&self, t: f64, p: &[f64], grad: &mut [f64]) {
        let ea = (-p[0] * t).exp();
        let eb = (-p[2] * t).exp();
        let (s, c) = (p[3] * t).sin_cos();
        grad[0] = t * ea;
        grad[1] = 1.0 + eb * c;
        grad[2] = -p[1] * t * eb * c;
        grad[3] = -p[1] * t * eb * s;
    }
}
