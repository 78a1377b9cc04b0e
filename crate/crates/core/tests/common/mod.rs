#![allow(dead_code)]

use std::path::PathBuf;

use symcool::orchestrator::{Experiment, ExperimentConfig};

pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

pub fn load(name: &str) -> ExperimentConfig {
    ExperimentConfig::load(&config_path(name)).expect("shipped config loads")
}

pub fn experiment(name: &str) -> Experiment {
    Experiment::new(load(name)).expect("shipped config builds")
}

/// Asymptotic Kolmogorov tail `P(D_n > d)` with the Stephens small-sample
/// correction.
pub fn ks_pvalue(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample KS statistic of `u` against Uniform(0, 1).
pub fn ks_uniform(u: &mut [f64]) -> f64 {
    u.sort_by(f64::total_cmp);
    let n = u.len() as f64;
    u.iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).max((i + 1) as f64 / n - x))
        .fold(0.0, f64::max)
}

/// Randomized probability-integral transform of sampled counts against
/// their exact binomial law, then a KS test for uniformity. Returns the
/// p-value over `points` draws with random `(p, shots)`.
pub fn binomial_calibration_pvalue(points: usize, seed: u64) -> f64 {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::{Binomial, DiscreteCDF};
    use symcool::measurement::{sample_point, Channel, DetectionModel};
    use symcool::orchestrator::derive_seed;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u: Vec<f64> = (0..points)
        .map(|i| {
            let p: f64 = rng.random_range(0.02..0.98);
            let shots: u64 = rng.random_range(20..=500);
            let det = DetectionModel::ideal(shots);
            let k = sample_point(p, &det, Channel::Coolant, derive_seed(seed, &[i as u64]), i as u64).unwrap();
            let law = Binomial::new(p, shots).unwrap();
            let lo = if k == 0 { 0.0 } else { law.cdf(k - 1) };
            let hi = law.cdf(k);
            lo + rng.random::<f64>() * (hi - lo)
        })
        .collect();
    ks_pvalue(ks_uniform(&mut u), points)
}
