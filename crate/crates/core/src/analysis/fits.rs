use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::lm::{covariance, levenberg_marquardt, FitModel, LmOptions, LmOutcome};
use super::models::{DecayModel, ExpDecayModel, FringeModel, RepumpModel, SidebandPairModel};
use super::result::{DecayData, FitResult};
use crate::error::{Error, Result};
use crate::measurement::ExperimentRecord;

/// Binomial standard error of a fraction from an observed count, with the
/// ±1/2 regularization that keeps empty and full bins finite.
pub fn observed_sigma(successes: f64, shots: f64) -> f64 {
    ((successes + 0.5) * (shots - successes + 0.5) / shots).sqrt() / shots
}

/// Same, with the count replaced by its expectation under the model.
pub fn model_sigma(p: f64, shots: f64) -> f64 {
    observed_sigma(p.clamp(0.0, 1.0) * shots, shots)
}

/// Weight refinements after the first fit.
const REWEIGHT_PASSES: usize = 2;

/// Fits fractions from counts. The first pass weights by the observed
/// counts; later passes by the counts the current fit predicts, which
/// removes the pull toward low-count points.
fn fit_counts(
    model: &dyn FitModel,
    record: &ExperimentRecord,
    p0: &[f64],
    opts: &LmOptions,
) -> Result<(LmOutcome, usize)> {
    let xs = record.xs();
    let ys: Vec<f64> = record.points.iter().map(|p| p.fraction()).collect();
    let shots: Vec<f64> = record.points.iter().map(|p| p.shots as f64).collect();
    let mut sigmas: Vec<f64> = record
        .points
        .iter()
        .map(|p| observed_sigma(p.successes, p.shots as f64))
        .collect();
    let mut out = levenberg_marquardt(model, &xs, &ys, &sigmas, p0, opts)?;
    let mut iterations = out.iterations;
    for _ in 0..REWEIGHT_PASSES {
        for i in 0..xs.len() {
            sigmas[i] = model_sigma(model.value(xs[i], &out.params), shots[i]);
        }
        out = levenberg_marquardt(model, &xs, &ys, &sigmas, &out.params, opts)?;
        iterations += out.iterations;
    }
    Ok((out, iterations))
}

fn to_result(model: &dyn FitModel, out: &LmOutcome, iterations: usize, points: usize) -> FitResult {
    let (cov, unconstrained) = covariance(&out.normal_matrix);
    let m = out.params.len();
    let mut r = FitResult {
        model_name: model.name().to_string(),
        param_names: model.param_names().iter().map(|s| s.to_string()).collect(),
        params: out.params.clone(),
        sigmas: (0..m).map(|i| cov[(i, i)].max(0.0).sqrt()).collect(),
        covariance: (0..m).map(|i| (0..m).map(|j| cov[(i, j)]).collect()).collect(),
        residual_norm: out.cost.sqrt(),
        points,
        converged: out.converged,
        iterations,
        derived: Vec::new(),
        flags: Vec::new(),
    };
    if !out.converged {
        r.flag("not_converged");
    }
    for i in unconstrained {
        r.flag(&format!("unconstrained_{}", model.param_names()[i]));
    }
    r
}

/// Linear least squares on a design matrix, used for seeds.
fn linear_fit(rows: &[Vec<f64>], ys: &[f64]) -> Option<Vec<f64>> {
    let m = rows.first()?.len();
    let a = DMatrix::from_fn(rows.len(), m, |i, j| rows[i][j]);
    let b = DVector::from_column_slice(ys);
    let sol = a.svd(true, true).solve(&b, 1e-12).ok()?;
    Some(sol.iter().copied().collect())
}

fn wrap_phase(phi: f64) -> f64 {
    let w = (phi + PI).rem_euclid(TAU) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

/// Simultaneous red/blue sideband fit. The probe duration is read from the
/// `pulse_duration_s` metadata entry.
pub fn fit_sideband_scan(record: &ExperimentRecord) -> Result<FitResult> {
    let t = record
        .meta("pulse_duration_s")
        .and_then(|v| v.parse::<f64>().ok())
        .filter(|t| *t > 0.0)
        .ok_or_else(|| Error::Fit("sideband record lacks a positive pulse_duration_s".into()))?;
    fit_sideband_scan_with(record, t)
}

pub fn fit_sideband_scan_with(record: &ExperimentRecord, pulse_duration: f64) -> Result<FitResult> {
    let model = SidebandPairModel { pulse_duration };
    let peak = |red: bool| {
        record
            .points
            .iter()
            .filter(|p| (p.x < 0.0) == red)
            .map(|p| (p.fraction(), p.x))
            .fold(None, |best: Option<(f64, f64)>, cur| match best {
                Some(b) if b.0 >= cur.0 => Some(b),
                _ => Some(cur),
            })
    };
    let (Some((red_peak, _)), Some((blue_peak, blue_x))) = (peak(true), peak(false)) else {
        return Err(Error::Fit("sideband record must cover both sidebands".into()));
    };
    // sidebands sit symmetrically about the carrier
    let width = 0.5 / pulse_duration;
    let p0 = [red_peak.max(1e-3), -blue_x, width, blue_peak.max(1e-3), blue_x, width];
    let opts = LmOptions::new(6)
        .floor(0, 0.0)
        .floor(3, 0.0)
        .floor(2, 0.01 * width)
        .floor(5, 0.01 * width);
    let (out, iters) = fit_counts(&model, record, &p0, &opts)?;
    let mut r = to_result(&model, &out, iters, record.points.len());

    let (ar, ab) = (r.params[0], r.params[3]);
    if ab <= 0.0 {
        r.flag("no_blue_sideband");
        r.push_derived("r", f64::NAN, f64::NAN);
        r.push_derived("nbar", f64::NAN, f64::NAN);
        return Ok(r);
    }
    let ratio = ar / ab;
    let g = [1.0 / ab, 0.0, 0.0, -ar / (ab * ab), 0.0, 0.0];
    let sigma_r = r.propagate(&g).max(0.0).sqrt();
    r.push_derived("r", ratio, sigma_r);
    if ratio >= 1.0 {
        r.flag("nbar_unbounded");
        r.push_derived("nbar", f64::INFINITY, f64::INFINITY);
    } else {
        let q = 1.0 - ratio;
        r.push_derived("nbar", ratio / q, sigma_r / (q * q));
    }
    Ok(r)
}

/// Sinusoid in the analysis phase with unit period 2π.
pub fn fit_ramsey_fringe(record: &ExperimentRecord) -> Result<FitResult> {
    let n = record.points.len();
    if n < 4 {
        return Err(Error::Fit(format!("fringe fit needs at least 4 points, got {n}")));
    }
    let mut xs = record.xs();
    xs.sort_by(f64::total_cmp);
    let span = xs[n - 1] - xs[0];
    let spacing = span / (n - 1) as f64;
    if span + spacing < TAU * (1.0 - 1e-9) {
        return Err(Error::Fit("phase grid does not span a full fringe period".into()));
    }
    let rows: Vec<Vec<f64>> = record.points.iter().map(|p| vec![1.0, p.x.cos(), p.x.sin()]).collect();
    let ys: Vec<f64> = record.points.iter().map(|p| p.fraction()).collect();
    let c = linear_fit(&rows, &ys).ok_or_else(|| Error::Fit("degenerate phase grid".into()))?;
    let p0 = [c[1].hypot(c[2]), (-c[2]).atan2(c[1]), c[0]];
    let (out, iters) = fit_counts(&FringeModel, record, &p0, &LmOptions::new(3))?;
    let mut r = to_result(&FringeModel, &out, iters, n);
    if r.params[0] < 0.0 {
        r.params[0] = -r.params[0];
        r.params[1] += PI;
        for j in 0..3 {
            if j != 0 {
                r.covariance[0][j] = -r.covariance[0][j];
                r.covariance[j][0] = -r.covariance[j][0];
            }
        }
    }
    r.params[1] = wrap_phase(r.params[1]);
    Ok(r)
}

/// Contrast against cycle count. Primary form `a0 (1 - ε)^N`; the
/// exponential form's `k` and `1 - e^{-k}` are reported as derived values.
pub fn fit_contrast_decay(data: &DecayData) -> Result<FitResult> {
    let n = data.cycles.len();
    if data.amplitude.len() != n || data.sigma.len() != n {
        return Err(Error::Fit("decay columns differ in length".into()));
    }
    let mut distinct = data.cycles.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::Fit("contrast decay needs at least 3 distinct cycle counts".into()));
    }
    if data.amplitude.iter().any(|a| !(*a > 0.0)) {
        return Err(Error::Fit("contrast decay needs positive amplitudes".into()));
    }
    let norm = match data.control {
        Some((a, _)) if a > 0.0 => a,
        Some(_) => return Err(Error::Fit("control amplitude must be positive".into())),
        None => 1.0,
    };
    let ys: Vec<f64> = data.amplitude.iter().map(|a| a / norm).collect();
    let sig: Vec<f64> = data.sigma.iter().map(|s| s / norm).collect();

    let rows: Vec<Vec<f64>> = data.cycles.iter().map(|c| vec![1.0, *c]).collect();
    let logs: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let c = linear_fit(&rows, &logs).ok_or_else(|| Error::Fit("degenerate cycle grid".into()))?;
    let (a0, k0) = (c[0].exp(), -c[1]);

    let primary = levenberg_marquardt(&DecayModel, &data.cycles, &ys, &sig, &[a0, 1.0 - (-k0).exp()], &LmOptions::new(2))?;
    let expo = levenberg_marquardt(&ExpDecayModel, &data.cycles, &ys, &sig, &[a0, k0], &LmOptions::new(2))?;
    let mut r = to_result(&DecayModel, &primary, primary.iterations, n);
    let e = to_result(&ExpDecayModel, &expo, expo.iterations, n);
    let (k, sk) = (e.params[1], e.sigmas[1]);
    r.push_derived("k_exp", k, sk);
    r.push_derived("epsilon_exp", 1.0 - (-k).exp(), (-k).exp() * sk);
    if !e.converged {
        r.flag("exp_form_not_converged");
    }
    Ok(r)
}

/// Angular frequency of the strongest oscillation after removing a
/// quadratic trend.
pub fn dominant_angular_frequency(ts: &[f64], ys: &[f64]) -> Option<f64> {
    let n = ts.len();
    if n < 4 {
        return None;
    }
    let rows: Vec<Vec<f64>> = ts.iter().map(|t| vec![1.0, *t, t * t]).collect();
    let trend = linear_fit(&rows, ys)?;
    let resid: Vec<f64> = ts
        .iter()
        .zip(ys)
        .map(|(t, y)| y - trend[0] - trend[1] * t - trend[2] * t * t)
        .collect();
    let span = ts.iter().copied().fold(f64::NEG_INFINITY, f64::max) - ts.iter().copied().fold(f64::INFINITY, f64::min);
    if !(span > 0.0) {
        return None;
    }
    let dt = span / (n - 1) as f64;
    let padded = (8 * n).next_power_of_two();
    let uniform = ts.windows(2).all(|w| ((w[1] - w[0]) - dt).abs() < 1e-6 * dt);
    let power: Vec<f64> = if uniform {
        let mut buf: Vec<Complex<f64>> = resid.iter().map(|r| Complex::new(*r, 0.0)).collect();
        buf.resize(padded, Complex::new(0.0, 0.0));
        FftPlanner::new().plan_fft_forward(padded).process(&mut buf);
        buf[..padded / 2].iter().map(|c| c.norm_sqr()).collect()
    } else {
        (0..padded / 2)
            .map(|k| {
                let w = TAU * k as f64 / (padded as f64 * dt);
                let (re, im) = ts
                    .iter()
                    .zip(&resid)
                    .fold((0.0, 0.0), |(a, b), (t, r)| (a + r * (w * t).cos(), b - r * (w * t).sin()));
                re * re + im * im
            })
            .collect()
    };
    let (k, _) = power
        .iter()
        .enumerate()
        .skip(1)
        .fold((0, f64::NEG_INFINITY), |best, (i, p)| if *p > best.1 { (i, *p) } else { best });
    if k == 0 {
        return None;
    }
    let shift = if k + 1 < power.len() {
        let (a, b, c) = (power[k - 1], power[k], power[k + 1]);
        let denom = a - 2.0 * b + c;
        if denom != 0.0 {
            0.5 * (a - c) / denom
        } else {
            0.0
        }
    } else {
        0.0
    };
    Some(TAU * (k as f64 + shift) / (padded as f64 * dt))
}

/// The four-parameter repump-scan fit, duration in seconds.
pub fn fit_repump_scan(record: &ExperimentRecord) -> Result<FitResult> {
    let n = record.points.len();
    if n < 5 {
        return Err(Error::Fit(format!("repump fit needs at least 5 points, got {n}")));
    }
    let mut pts: Vec<(f64, f64)> = record.points.iter().map(|p| (p.x, p.fraction())).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (t0, y0) = pts[0];
    let (t_end, y_end) = pts[n - 1];
    let span = t_end - t0;
    if !(span > 0.0) {
        return Err(Error::Fit("repump grid has zero span".into()));
    }
    let ts: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let dq0 = dominant_angular_frequency(&ts, &ys).unwrap_or(TAU / span);
    let a0 = (0.5 * y0).max(1e-3);
    let baseline = (y_end - a0).clamp(1e-6, 0.99);
    let alpha0 = (-(1.0 - baseline).ln() / t_end.max(span)).max(1e-3 / span);

    let opts = LmOptions::new(4).floor(2, 0.0);
    let mut best: Option<(LmOutcome, usize)> = None;
    for beta_scale in [0.1, 0.5, 2.0] {
        let p0 = [alpha0, a0, beta_scale / span, dq0];
        let Ok(candidate) = fit_counts(&RepumpModel, record, &p0, &opts) else { continue };
        if best.as_ref().is_none_or(|b| candidate.0.cost < b.0.cost) {
            best = Some(candidate);
        }
    }
    let (out, iters) = best.ok_or_else(|| Error::Fit("repump fit failed from every starting point".into()))?;
    let mut r = to_result(&RepumpModel, &out, iters, n);
    if r.params[3] < 0.0 {
        r.params[3] = -r.params[3];
        for j in 0..4 {
            if j != 3 {
                r.covariance[3][j] = -r.covariance[3][j];
                r.covariance[j][3] = -r.covariance[j][3];
            }
        }
    }
    let (amp, s_amp) = (r.params[1], r.sigmas[1]);
    if amp.abs() <= 2.0 * s_amp || r.has_flag("unconstrained_delta_q") {
        r.flag("delta_q_degenerate");
    }
    if r.params[2] == 0.0 {
        r.flag("beta_at_floor");
    }
    if span * r.params[3] < 2.0 * TAU {
        r.flag("short_grid");
    }
    Ok(r)
}
