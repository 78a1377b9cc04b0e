//! Exit criteria. Prints one line per criterion and exits nonzero if any
//! fails.

mod common;

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symcool::analysis::models::{DecayModel, ExpDecayModel, FringeModel, RepumpModel, SidebandPairModel};
use symcool::analysis::gradient_mismatch;
use symcool::cooling::cooling_cycle;
use symcool::crystal::{axial_modes, Mode};
use symcool::motion::thermal_state;
use symcool::orchestrator::{derive_seed, par_map, run, Experiment, Precool};
use symcool::qubit::{
    gate_error_budget, light_shift_phase, pumping_scan, repump_scatter_rate, scattering_per_cycle, PumpingModel,
};

const SEEDS: u64 = 200;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn within_runtime(elapsed: Duration, limit: Duration) -> (bool, String) {
    (elapsed < limit, format!("{:.3} s (limit {:.3} s)", elapsed.as_secs_f64(), limit.as_secs_f64()))
}

fn seeds() -> Vec<u64> {
    (0..SEEDS).collect()
}

fn fraction(hits: usize) -> f64 {
    hits as f64 / SEEDS as f64
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn mode_frequencies() -> Verdict {
    let wz = TAU * 500e3;
    let t = Instant::now();
    let ca = axial_modes(40.0, 43.0, wz).unwrap();
    let eq = axial_modes(40.0, 40.0, wz).unwrap();
    let (time_ok, time) = within_runtime(t.elapsed(), Duration::from_millis(1));
    let [r_in, r_out] = ca.ratios();
    let two_dp = |x: f64| (x * 100.0).round() / 100.0;
    let ca_ok = two_dp(r_in) == 0.98 && two_dp(r_out) == 1.70;
    let [e_in, e_out] = eq.ratios();
    let eq_err = (e_in - 1.0).abs().max((e_out - 3f64.sqrt()).abs());
    verdict(
        ca_ok && eq_err < 1e-10 && time_ok,
        format!("40/43 ratios {r_in:.4}, {r_out:.4}; equal-mass error {eq_err:.1e}; {time}"),
    )
}

fn cooling_endpoint() -> Verdict {
    let exp = common::experiment("fig2.cfg");
    let t = Instant::now();
    let start = exp.precooled(Precool::Raman).unwrap();
    let traj = exp.cooling_trajectory(Mode::OutOfPhase, &start, 10);
    let (time_ok, time) = within_runtime(t.elapsed(), Duration::from_secs(1));
    let end = traj.last().unwrap();
    let (nbar, p0) = (end.mean_n(), end.p(0));
    verdict(
        nbar < 0.12 && p0 > 0.9 && time_ok,
        format!("from {:.2}: nbar_out {nbar:.4}, p0 {p0:.4} after 10 cycles; {time}", start.mean_n()),
    )
}

fn thermometry_round_trip() -> Verdict {
    let exp = common::experiment("fig1.cfg");
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (mode, truth) in [(Mode::InPhase, 0.06), (Mode::OutOfPhase, 0.07)] {
        let dist = exp.thermal(truth).unwrap();
        let fits = par_map(&seeds(), |&s| {
            let (_, fit) = exp.thermometry(mode, &dist, derive_seed(s, &[mode.index() as u64])).unwrap();
            let d = fit.derived("nbar").unwrap();
            (d.value, d.sigma)
        });
        let covered = fits.iter().filter(|(v, s)| (v - truth).abs() <= *s).count();
        let cov = fraction(covered);
        let sigma = median(fits.iter().map(|f| f.1).collect());
        // "of order 0.03-0.05": accept within a factor of two of that range.
        ok &= cov >= 0.68 && (0.015..=0.10).contains(&sigma);
        parts.push(format!("nbar {truth}: coverage {cov:.3}, median sigma {sigma:.4}"));
    }
    let (time_ok, time) = within_runtime(t.elapsed(), Duration::from_secs(60));
    verdict(ok && time_ok, format!("{}; {time}", parts.join("; ")))
}

fn coherence_decay() -> Verdict {
    let exp = common::experiment("fig2.cfg");
    let s = &exp.gap.scatter;
    let params_ok = (s.delta - TAU * 30e9).abs() < 1.0 && s.gamma == exp.constants.gamma;
    let scattering_share = scattering_per_cycle(s).decohering / exp.config.scatter.eps_total;
    let t = Instant::now();
    let eps = par_map(&seeds(), |&seed| exp.contrast_series(10, 2, seed).unwrap().fit.params[1]);
    let (time_ok, time) = within_runtime(t.elapsed(), Duration::from_secs(60));
    let hits = eps.iter().filter(|e| (*e - 0.033).abs() <= 0.004).count();
    let frac = fraction(hits);
    verdict(
        params_ok && frac >= 0.68 && time_ok,
        format!(
            "eps within 0.033 +/- 0.004 in {frac:.3} of seeds (median {:.4}); scattering share {scattering_share:.2}; {time}",
            median(eps.clone())
        ),
    )
}

fn repump_only_control() -> Verdict {
    let exp = common::experiment("fig2.cfg");
    let t = Instant::now();
    let runs = par_map(&seeds(), |&s| exp.repump_control(10, s).unwrap());
    let (time_ok, time) = within_runtime(t.elapsed(), Duration::from_secs(10));
    let loss = 1.0 - runs[0].model_ratio;
    let z = |r: &symcool::orchestrator::RepumpControl| (r.ratio - 1.08).abs() / (r.ratio_sigma.powi(2) + 0.09f64.powi(2)).sqrt();
    let consistent = runs.iter().filter(|r| z(r) <= 2.0).count();
    let own = exp.repump_control(10, exp.config.seed).unwrap();
    let frac = fraction(consistent);
    verdict(
        loss < 7e-3 && z(&own) <= 2.0 && frac >= 0.9 && time_ok,
        format!(
            "model loss {loss:.2e}; config seed ratio {:.3} +/- {:.3} (z {:.2}); z <= 2 in {frac:.3} of seeds; {time}",
            own.ratio,
            own.ratio_sigma,
            z(&own)
        ),
    )
}

fn light_shift() -> Verdict {
    let exp = common::experiment("fig3.cfg");
    let t = Instant::now();
    let scan = pumping_scan(&exp.pumping, &[0.0]).unwrap();
    let (time_ok, time) = within_runtime(t.elapsed(), Duration::from_secs(10));
    let dq_hz = scan.delta_q / TAU;
    let dq_ok = (dq_hz - 623.0).abs() / 623.0 < 0.05;
    let alpha_ok = (scan.alpha - 21.0).abs() <= 3.0;
    let phi = light_shift_phase(TAU * 623.0, 10e-6);
    let phi_ok = (phi * 1e3).round() == 39.0;
    let r = repump_scatter_rate(21.0, 10e-6).unwrap();
    let r_ok = (r - 4.2e-4).abs() < 1e-12 && (3e-4..=5e-4).contains(&r);
    verdict(
        dq_ok && alpha_ok && phi_ok && r_ok && time_ok && exp.pumping.intensity == 10.6,
        format!(
            "dq {dq_hz:.1} Hz, alpha {:.2} 1/s, phase {:.2} mrad, R_sigma {r:.2e}; {time}",
            scan.alpha,
            phi * 1e3
        ),
    )
}

fn repump_fit_round_trip() -> Verdict {
    let truth = [21.0, 0.076, 60.0, TAU * 623.0];
    let names = ["alpha", "amplitude", "beta", "delta_q"];

    let mut cfg = common::load("fig3.cfg");
    cfg.detection.noiseless = true;
    let exact = Experiment::new(cfg).unwrap().repump_scan(0).unwrap().1;
    let worst = (0..4)
        .map(|i| (exact.params[i] - truth[i]).abs() / truth[i])
        .fold(0.0, f64::max);

    let exp = common::experiment("fig3.cfg");
    let fits = par_map(&seeds(), |&s| exp.repump_scan(s).unwrap().1);
    let mut ok = worst < 1e-6;
    let mut cov = Vec::new();
    for i in 0..4 {
        let hits = fits.iter().filter(|f| (f.params[i] - truth[i]).abs() <= f.sigmas[i]).count();
        let c = fraction(hits);
        ok &= (0.60..=0.76).contains(&c);
        cov.push(format!("{} {c:.3}", names[i]));
    }
    verdict(ok, format!("noiseless worst rel error {worst:.1e}; coverage {}", cov.join(", ")))
}

fn budget_arithmetic() -> Verdict {
    let g = gate_error_budget(0.1, 1.0, 0.0, 0.0).unwrap().gamma_thermal;
    let oracle = 0.3 * std::f64::consts::PI.powi(2) * 0.1f64.powi(4) * 1.0 * 2.0;
    let g_ok = (g - oracle).abs() < 1e-7 && format!("{g:.2e}") == "5.92e-4";

    let exp = common::experiment("fig2.cfg");
    let b = scattering_per_cycle(&exp.gap.scatter);
    let photons = exp.gap.scatter.photons_per_repump;
    let r_ok = photons == 3.0 && format!("{:.0e}", b.r_sigma) == "1e-4";
    verdict(
        g_ok && r_ok,
        format!(
            "gamma_T {g:.5e} (formula {oracle:.5e}, offset from 5.92e-4 {:.1e}); R_sigma {:.3e} at {photons} photons",
            g - 5.92e-4,
            b.r_sigma
        ),
    )
}

fn property_suites() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut notes = Vec::new();

    let exp = common::experiment("fig2.cfg");
    let mut worst_norm: f64 = 0.0;
    for _ in 0..50 {
        let nbar = rng.random_range(0.01..3.0);
        let mut d = thermal_state(nbar, 60).unwrap();
        let params = exp.cooling_params(if rng.random::<bool>() { Mode::InPhase } else { Mode::OutOfPhase });
        for _ in 0..10 {
            d = cooling_cycle(&d, &params);
            worst_norm = worst_norm.max((d.total() - 1.0).abs());
        }
    }
    let pump = pumping_scan(&PumpingModel { ..exp.pumping.clone() }, &[0.0, 1e-3, 5e-3]).unwrap();
    worst_norm = worst_norm.max(pump.max_population_error);
    let norm_ok = worst_norm < 1e-9;
    notes.push(format!("normalization {worst_norm:.1e}"));

    let mut worst_jac: f64 = 0.0;
    for _ in 0..200 {
        let t: f64 = rng.random_range(10e-6..40e-6);
        let sb = SidebandPairModel { pulse_duration: t };
        let f: f64 = rng.random_range(5e5..1.5e6);
        let p = [
            rng.random_range(0.01..1.0),
            -f + rng.random_range(-2e3..2e3),
            rng.random_range(0.3..0.7) / t,
            rng.random_range(0.01..1.0),
            f + rng.random_range(-2e3..2e3),
            rng.random_range(0.3..0.7) / t,
        ];
        let x = if rng.random::<bool>() { p[1] } else { p[4] } + rng.random_range(-1.5..1.5) / t;
        worst_jac = worst_jac.max(gradient_mismatch(&sb, x, &p));

        let fr = [rng.random_range(0.05..0.5), rng.random_range(-3.0..3.0), rng.random_range(0.2..0.8)];
        worst_jac = worst_jac.max(gradient_mismatch(&FringeModel, rng.random_range(0.0..TAU), &fr));
        let n = rng.random_range(0.0..20.0);
        let dec = [rng.random_range(0.2..1.0), rng.random_range(0.001..0.2)];
        worst_jac = worst_jac.max(gradient_mismatch(&DecayModel, n, &dec));
        worst_jac = worst_jac.max(gradient_mismatch(&ExpDecayModel, n, &dec));
        let rp = [
            rng.random_range(1.0..100.0),
            rng.random_range(0.01..0.2),
            rng.random_range(1.0..200.0),
            TAU * rng.random_range(100.0..2000.0),
        ];
        worst_jac = worst_jac.max(gradient_mismatch(&RepumpModel, rng.random_range(0.0..5e-3), &rp));
    }
    let jac_ok = worst_jac < 1e-6;
    notes.push(format!("jacobian {worst_jac:.1e}"));

    let cfg = common::load("fig2.cfg");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let out_a = run(&cfg, a.path()).unwrap();
    run(&cfg, b.path()).unwrap();
    let identical = out_a.files.iter().all(|f| {
        let rel = f.strip_prefix(a.path()).unwrap();
        std::fs::read(f).unwrap() == std::fs::read(b.path().join(rel)).unwrap()
    });
    notes.push(format!("determinism {} files {}", out_a.files.len(), if identical { "identical" } else { "DIFFER" }));

    let p = common::binomial_calibration_pvalue(10_000, 41);
    notes.push(format!("binomial KS p {p:.3}"));

    verdict(norm_ok && jac_ok && identical && p > 0.01, notes.join("; "))
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 9] = [
        ("mode frequencies", mode_frequencies),
        ("cooling endpoint", cooling_endpoint),
        ("thermometry round trip", thermometry_round_trip),
        ("coherence decay", coherence_decay),
        ("repump-only control", repump_only_control),
        ("light shift", light_shift),
        ("repump fit round trip", repump_fit_round_trip),
        ("budget arithmetic", budget_arithmetic),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        if !v.passed {
            failed += 1;
        }
        println!(
            "criterion {} {:<24} {}  {}",
            i + 1,
            name,
            if v.passed { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
