//! Damped least squares with analytic Jacobians.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// A scalar model `f(x; p)` with its parameter gradient.
pub trait FitModel: Sync {
    fn name(&self) -> &'static str;
    fn param_names(&self) -> &'static [&'static str];
    fn value(&self, x: f64, p: &[f64]) -> f64;
    fn gradient(&self, x: f64, p: &[f64], grad: &mut [f64]);
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Stop when an accepted step lowers the cost by less than this fraction.
    pub rel_tol: f64,
    pub grad_tol: f64,
    /// Per-parameter lower bounds; steps are projected onto them.
    pub lower: Vec<f64>,
}

impl LmOptions {
    pub fn new(n_params: usize) -> Self {
        LmOptions {
            max_iterations: 200,
            rel_tol: 1e-10,
            grad_tol: 1e-12,
            lower: vec![f64::NEG_INFINITY; n_params],
        }
    }

    pub fn floor(mut self, index: usize, bound: f64) -> Self {
        self.lower[index] = bound;
        self
    }
}

#[derive(Debug, Clone)]
pub struct LmOutcome {
    pub params: Vec<f64>,
    /// Σ ((y - f) / σ)².
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Jᵀ J of the weighted residuals at the solution.
    pub normal_matrix: DMatrix<f64>,
}

struct Linearization {
    jtj: DMatrix<f64>,
    grad: DVector<f64>,
    cost: f64,
}

fn cost_of(model: &dyn FitModel, xs: &[f64], ys: &[f64], sigmas: &[f64], p: &[f64]) -> f64 {
    xs.iter()
        .zip(ys)
        .zip(sigmas)
        .map(|((x, y), s)| {
            let r = (y - model.value(*x, p)) / s;
            r * r
        })
        .sum()
}

fn linearize(model: &dyn FitModel, xs: &[f64], ys: &[f64], sigmas: &[f64], p: &[f64]) -> Linearization {
    let m = p.len();
    let mut jtj = DMatrix::zeros(m, m);
    let mut grad = DVector::zeros(m);
    let mut cost = 0.0;
    let mut g = vec![0.0; m];
    for ((x, y), s) in xs.iter().zip(ys).zip(sigmas) {
        let r = (y - model.value(*x, p)) / s;
        model.gradient(*x, p, &mut g);
        for a in 0..m {
            let ja = g[a] / s;
            grad[a] += ja * r;
            for b in a..m {
                jtj[(a, b)] += ja * g[b] / s;
            }
        }
        cost += r * r;
    }
    for a in 0..m {
        for b in 0..a {
            jtj[(a, b)] = jtj[(b, a)];
        }
    }
    Linearization { jtj, grad, cost }
}

fn solve_damped(jtj: &DMatrix<f64>, grad: &DVector<f64>, lambda: f64) -> Option<DVector<f64>> {
    let m = jtj.nrows();
    let scale = (0..m).map(|i| jtj[(i, i)]).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut a = jtj.clone();
    for i in 0..m {
        a[(i, i)] += lambda * jtj[(i, i)].max(1e-12 * scale);
    }
    a.cholesky().map(|c| c.solve(grad))
}

/// Minimizes `Σ ((y - f(x; p)) / σ)²` from `p0`.
pub fn levenberg_marquardt(
    model: &dyn FitModel,
    xs: &[f64],
    ys: &[f64],
    sigmas: &[f64],
    p0: &[f64],
    opts: &LmOptions,
) -> Result<LmOutcome> {
    let m = p0.len();
    if m != model.param_names().len() || opts.lower.len() != m {
        return Err(Error::Fit(format!("{}: wrong number of parameters", model.name())));
    }
    if xs.len() != ys.len() || xs.len() != sigmas.len() {
        return Err(Error::Fit("data columns differ in length".into()));
    }
    if xs.len() < m {
        return Err(Error::Fit(format!(
            "{}: {} points cannot constrain {m} parameters",
            model.name(),
            xs.len()
        )));
    }
    if sigmas.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::Fit("uncertainties must be positive".into()));
    }
    let project = |p: &mut [f64]| {
        for (v, lo) in p.iter_mut().zip(&opts.lower) {
            if *v < *lo {
                *v = *lo;
            }
        }
    };
    let mut p = p0.to_vec();
    project(&mut p);
    let mut lin = linearize(model, xs, ys, sigmas, &p);
    if !lin.cost.is_finite() {
        return Err(Error::Fit(format!("{}: model is not finite at the initial guess", model.name())));
    }
    let floor = 1e-28 * xs.len() as f64;
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        iterations += 1;
        if lin.grad.amax() < opts.grad_tol || lin.cost <= floor {
            converged = true;
            break;
        }
        let mut accepted = false;
        while lambda < 1e16 {
            let Some(step) = solve_damped(&lin.jtj, &lin.grad, lambda) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            project(&mut trial);
            let moved = trial.iter().zip(&p).any(|(a, b)| a != b);
            let c = cost_of(model, xs, ys, sigmas, &trial);
            if c.is_finite() && c <= lin.cost && moved {
                let rel = (lin.cost - c) / lin.cost.max(f64::MIN_POSITIVE);
                p = trial;
                lin = linearize(model, xs, ys, sigmas, &p);
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                if rel < opts.rel_tol {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        // no step lowers the cost at machine precision: stationary point
        if !accepted {
            converged = true;
        }
        if converged {
            break;
        }
    }
    Ok(LmOutcome {
        params: p,
        cost: lin.cost,
        iterations,
        converged,
        normal_matrix: lin.jtj,
    })
}

/// Covariance `(JᵀJ)⁻¹`. Directions the data do not constrain get infinite
/// variance; their indices are returned.
pub fn covariance(normal: &DMatrix<f64>) -> (DMatrix<f64>, Vec<usize>) {
    let m = normal.nrows();
    let diag_max = (0..m).map(|i| normal[(i, i)]).fold(0.0, f64::max);
    let unconstrained: Vec<usize> = (0..m).filter(|&i| !(normal[(i, i)] > 1e-20 * diag_max)).collect();
    let keep: Vec<usize> = (0..m).filter(|i| !unconstrained.contains(i)).collect();
    let sub = DMatrix::from_fn(keep.len(), keep.len(), |a, b| normal[(keep[a], keep[b])]);
    // symmetric scaling keeps the eigen-threshold meaningful across units
    let d: Vec<f64> = (0..keep.len()).map(|i| sub[(i, i)].sqrt()).collect();
    let scaled = DMatrix::from_fn(keep.len(), keep.len(), |a, b| sub[(a, b)] / (d[a] * d[b]));
    let eig = SymmetricEigen::new(scaled);
    let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let inv_vals = eig.eigenvalues.map(|v| if v > 1e-14 * top { 1.0 / v } else { 0.0 });
    let inv = &eig.eigenvectors * DMatrix::from_diagonal(&inv_vals) * eig.eigenvectors.transpose();
    let mut cov = DMatrix::zeros(m, m);
    for i in &unconstrained {
        cov[(*i, *i)] = f64::INFINITY;
    }
    for (a, &i) in keep.iter().enumerate() {
        for (b, &j) in keep.iter().enumerate() {
            cov[(i, j)] = inv[(a, b)] / (d[a] * d[b]);
        }
    }
    // exact symmetry
    for i in 0..m {
        for j in 0..i {
            let v = 0.5 * (cov[(i, j)] + cov[(j, i)]);
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    (cov, unconstrained)
}

/// Worst relative disagreement between the analytic gradient at `(x, p)`
/// and a five-point central difference. Differences inside the stencil's
/// rounding noise count as zero.
pub fn gradient_mismatch(model: &dyn FitModel, x: f64, p: &[f64]) -> f64 {
    let mut analytic = vec![0.0; p.len()];
    model.gradient(x, p, &mut analytic);
    let mut worst: f64 = 0.0;
    for j in 0..p.len() {
        let h = 1e-4 * p[j].abs().max(1e-3);
        let at = |d: f64| {
            let mut q = p.to_vec();
            q[j] += d;
            model.value(x, &q)
        };
        let f = [at(2.0 * h), at(h), at(-h), at(-2.0 * h)];
        let fd = (8.0 * (f[1] - f[2]) - (f[0] - f[3])) / (12.0 * h);
        let fmax = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let noise = 32.0 * f64::EPSILON * fmax / h;
        let diff = (analytic[j] - fd).abs() - noise;
        if diff > 0.0 {
            worst = worst.max(diff / analytic[j].abs().max(fd.abs()));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Line;
    impl FitModel for Line {
        fn name(&self) -> &'static str {
            "line"
        }
        fn param_names(&self) -> &'static [&'static str] {
            &["a", "b"]
        }
        fn value(&self, x: f64, p: &[f64]) -> f64 {
            p[0] + p[1] * x
        }
        fn gradient(&self, x: f64, _p: &[f64], g: &mut [f64]) {
            g[0] = 1.0;
            g[1] = x;
        }
    }

    struct Expo;
    impl FitModel for Expo {
        fn name(&self) -> &'static str {
            "expo"
        }
        fn param_names(&self) -> &'static [&'static str] {
            &["a", "k"]
        }
        fn value(&self, x: f64, p: &[f64]) -> f64 {
            p[0] * (-p[1] * x).exp()
        }
        fn gradient(&self, x: f64, p: &[f64], g: &mut [f64]) {
            let e = (-p[1] * x).exp();
            g[0] = e;
            g[1] = -p[0] * x * e;
        }
    }

    #[test]
    fn weighted_line_matches_normal_equations() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = [1.1, 2.9, 5.2, 7.1, 8.8];
        let s = [0.1, 0.2, 0.1, 0.3, 0.2];
        let out = levenberg_marquardt(&Line, &xs, &ys, &s, &[0.0, 0.0], &LmOptions::new(2)).unwrap();
        // closed-form weighted regression
        let w: Vec<f64> = s.iter().map(|v| 1.0 / (v * v)).collect();
        let sw: f64 = w.iter().sum();
        let sx: f64 = w.iter().zip(&xs).map(|(w, x)| w * x).sum();
        let sy: f64 = w.iter().zip(&ys).map(|(w, y)| w * y).sum();
        let sxx: f64 = w.iter().zip(&xs).map(|(w, x)| w * x * x).sum();
        let sxy: f64 = w.iter().zip(xs.iter().zip(&ys)).map(|(w, (x, y))| w * x * y).sum();
        let det = sw * sxx - sx * sx;
        let b = (sw * sxy - sx * sy) / det;
        let a = (sy - b * sx) / sw;
        assert!(out.converged);
        assert!((out.params[0] - a).abs() < 1e-9 && (out.params[1] - b).abs() < 1e-9);
        let (cov, free) = covariance(&out.normal_matrix);
        assert!(free.is_empty());
        assert!((cov[(1, 1)] - sw / det).abs() < 1e-9 * sw / det);
    }

    #[test]
    fn exact_data_recovered_to_precision() {
        let xs: Vec<f64> = (0..30).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * (-1.3 * x).exp()).collect();
        let s = vec![0.01; xs.len()];
        let out = levenberg_marquardt(&Expo, &xs, &ys, &s, &[1.0, 0.2], &LmOptions::new(2)).unwrap();
        assert!(out.converged);
        assert!((out.params[0] - 2.5).abs() < 1e-10 && (out.params[1] - 1.3).abs() < 1e-10);
    }

    #[test]
    fn lower_bound_is_respected() {
        let xs = [0.0, 1.0, 2.0];
        let ys = [0.0, -1.0, -2.0];
        let opts = LmOptions::new(2).floor(1, 0.0);
        let out = levenberg_marquardt(&Line, &xs, &ys, &[1.0; 3], &[0.0, 1.0], &opts).unwrap();
        assert!(out.params[1] >= 0.0);
    }

    #[test]
    fn unconstrained_direction_gets_infinite_variance() {
        let normal = DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 0.0]);
        let (cov, free) = covariance(&normal);
        assert_eq!(free, vec![1]);
        assert!((cov[(0, 0)] - 0.25).abs() < 1e-15);
        assert!(cov[(1, 1)].is_infinite());
    }

    #[test]
    fn too_few_points() {
        assert!(levenberg_marquardt(&Line, &[1.0], &[1.0], &[1.0], &[0.0, 0.0], &LmOptions::new(2)).is_err());
    }
}
