mod common;

use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use symcool::analysis::models::{DecayModel, ExpDecayModel, FringeModel, RepumpModel, SidebandPairModel};
use symcool::analysis::{
    fit_contrast_decay, fit_ramsey_fringe, fit_repump_scan, fit_sideband_scan, gradient_mismatch, DecayData,
    FitResult,
};
use symcool::cooling::{cooling_cycle, run_cooling, CoolingParams};
use symcool::crystal::{axial_modes, Mode};
use symcool::measurement::{
    sample_point, synth_ramsey_scan, synth_scan, Channel, DetectionModel, ExperimentRecord, ScanPoint,
};
use symcool::motion::{
    nbar_from_ratio, sideband_excitation, thermal_state, FockDistribution, Sideband, SidebandScanModel,
};
use symcool::orchestrator::{par_map, Experiment};
use symcool::qubit::{
    apply_cooling_decoherence, pumping_scan, ramsey_sequence, scattering_per_cycle, GapContext, GapOp, PulseErrors,
    QubitCoherence, ScatterParams,
};

fn wrap(phi: f64) -> f64 {
    (phi + PI).rem_euclid(TAU) - PI
}

fn scatter_params(delta_ghz: f64, delta_i_mhz: f64, elastic: f64) -> ScatterParams {
    ScatterParams {
        gamma: TAU * 20.7e6,
        delta: TAU * delta_ghz * 1e9,
        delta_i: TAU * delta_i_mhz * 1e6,
        g_factor: 1.0,
        h_factor: 0.18,
        eta: 0.14,
        elastic_fraction: elastic,
        photons_per_repump: 3.0,
        r_sigma_override: None,
    }
}

fn gap(eps_raman: f64, elastic: f64) -> GapContext {
    GapContext {
        scatter: scatter_params(30.0, 781.0, elastic),
        eps_raman,
        delta_q: TAU * 623.0,
        tau_sigma: 10e-6,
        track_leakage: true,
    }
}

fn normalized(weights: Vec<f64>) -> FockDistribution {
    let s: f64 = weights.iter().sum();
    FockDistribution::from_probs(weights.into_iter().map(|w| w / s).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn equal_masses_give_root_three(m in 1.0f64..300.0, f in 1e4f64..1e7) {
        let r = axial_modes(m, m, TAU * f).unwrap().ratios();
        prop_assert!((r[0] - 1.0).abs() < 1e-10);
        prop_assert!((r[1] - 3f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn swapping_ions_keeps_frequencies(m1 in 1.0f64..200.0, m2 in 1.0f64..200.0, f in 1e5f64..2e6) {
        let wz = TAU * f;
        let a = axial_modes(m1, m2, wz).unwrap();
        // Same trap curvature, referenced to the other ion.
        let b = axial_modes(m2, m1, wz * (m1 / m2).sqrt()).unwrap();
        for i in 0..2 {
            prop_assert!((a.frequencies[i] - b.frequencies[i]).abs() < 1e-10 * a.frequencies[i]);
        }
    }

    #[test]
    fn mode_vectors_are_orthonormal(m1 in 1.0f64..200.0, m2 in 1.0f64..200.0) {
        let v = axial_modes(m1, m2, TAU * 1e6).unwrap().vectors;
        for a in 0..2 {
            for b in 0..2 {
                let g = v[a][0] * v[b][0] + v[a][1] * v[b][1];
                let want = if a == b { 1.0 } else { 0.0 };
                prop_assert!((g - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn frequencies_fall_smoothly_with_second_mass(m1 in 5.0f64..100.0, m2 in 5.0f64..100.0) {
        let wz = TAU * 500e3;
        let s = axial_modes(m1, m2, wz).unwrap();
        let mu = m2 / m1;
        // Hellmann-Feynman: dλ/dμ = vᵀ (dD/dμ) v for D = [[2, -μ^-1/2], [-μ^-1/2, 2/μ]].
        let off = 0.5 * mu.powf(-1.5);
        let diag = -2.0 / (mu * mu);
        let h = 1e-4 * m2;
        let lo = axial_modes(m1, m2 - h, wz).unwrap();
        let hi = axial_modes(m1, m2 + h, wz).unwrap();
        for k in 0..2 {
            let v = s.vectors[k];
            let dlambda = 2.0 * off * v[0] * v[1] + diag * v[1] * v[1];
            let analytic = wz * wz * dlambda / (2.0 * s.frequencies[k] * m1);
            let fd = (hi.frequencies[k] - lo.frequencies[k]) / (2.0 * h);
            prop_assert!(analytic < 0.0);
            prop_assert!((analytic - fd).abs() <= 1e-4 * analytic.abs());
        }
    }

    #[test]
    fn sideband_excitation_is_a_probability(
        nbar in 0.0f64..5.0,
        eta in 0.01f64..0.4,
        t in 1e-6f64..100e-6,
        rabi in 1e4f64..1e7,
        det in -1e6f64..1e6,
    ) {
        let d = thermal_state(nbar, 80).unwrap();
        let m = SidebandScanModel::new(t, rabi, eta, TAU * 1e6).unwrap();
        for sb in [Sideband::Red, Sideband::Blue, Sideband::Carrier] {
            let p = sideband_excitation(&d, &m, det, sb);
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }

    #[test]
    fn thermal_ratio_round_trip(nbar in 0.02f64..1.0, eta in 0.05f64..0.2) {
        let d = thermal_state(nbar, 120).unwrap();
        prop_assert!((d.total() - 1.0).abs() < 1e-9);
        let m = SidebandScanModel::pi_pulse_on_blue(24e-6, eta, TAU * 850e3).unwrap();
        let r = sideband_excitation(&d, &m, 0.0, Sideband::Red) / sideband_excitation(&d, &m, 0.0, Sideband::Blue);
        let back = nbar_from_ratio(r).unwrap();
        prop_assert!((back - nbar).abs() <= 0.05 * nbar);
    }

    #[test]
    fn cooling_keeps_normalization(
        weights in prop::collection::vec(0.0f64..1.0, 5..40),
        eta in 0.05f64..0.25,
        target in 1u32..4,
        photons in 0.0f64..6.0,
        heating in 0.0f64..500.0,
    ) {
        prop_assume!(weights.iter().sum::<f64>() > 1e-3);
        let mut d = normalized(weights);
        let p = CoolingParams {
            eta,
            rabi_carrier: PI / (eta * 15e-6),
            pulse_target_n: target,
            photons_per_repump: photons,
            heating_rate: heating,
            cycle_wall_time: 100e-6,
            ..CoolingParams::default()
        };
        for _ in 0..15 {
            d = cooling_cycle(&d, &p);
            prop_assert!((d.total() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn idealized_cycles_empty_low_levels(weights in prop::collection::vec(0.0f64..1.0, 2..12)) {
        prop_assume!(weights.iter().sum::<f64>() > 1e-3);
        let top = weights.len() - 1;
        let mut padded = weights;
        padded.resize(30, 0.0);
        let d = normalized(padded);
        let p = CoolingParams {
            eta: 0.1,
            rabi_carrier: PI / (0.1 * 15e-6),
            eta_recoil: 0.0,
            photons_per_repump: 0.0,
            idealized: true,
            ..CoolingParams::default()
        };
        let traj = run_cooling(&d, &p, top);
        prop_assert!((traj[top].p(0) - 1.0).abs() < 1e-12);
        prop_assert_eq!(&traj, &run_cooling(&d, &p, top));
    }

    #[test]
    fn contrast_never_increases(
        eps_raman in 0.0f64..0.2,
        elastic in 0.0f64..1.0,
        delta_ghz in 1.0f64..100.0,
        cycles in 1usize..40,
    ) {
        let mut ctx = gap(eps_raman, elastic);
        ctx.scatter.delta = TAU * delta_ghz * 1e9;
        let mut q = QubitCoherence::default();
        for _ in 0..cycles {
            let next = apply_cooling_decoherence(q, &ctx);
            prop_assert!(next.contrast <= q.contrast);
            prop_assert!(next.contrast >= 0.0);
            q = next;
        }
    }

    #[test]
    fn fringe_amplitude_is_product_of_factors(
        ops in prop::collection::vec(any::<bool>(), 0..30),
        eps_raman in 0.0f64..0.1,
        e1 in -0.1f64..0.1,
        e2 in -0.1f64..0.1,
    ) {
        let ctx = gap(eps_raman, 0.0);
        let ops: Vec<GapOp> = ops.into_iter().map(|c| if c { GapOp::CoolingCycle } else { GapOp::RepumpOnly }).collect();
        let f = ramsey_sequence(QubitCoherence::default(), PulseErrors { first: e1, second: e2 }, &ops, &ctx, 0.0, 0.0);
        let product: f64 = ops.iter().map(|o| match o {
            GapOp::CoolingCycle => ctx.cycle_factor(),
            GapOp::RepumpOnly => ctx.repump_factor(),
        }).product();
        let t1 = PI / 2.0 * (1.0 + e1);
        let t2 = PI / 2.0 * (1.0 + e2);
        prop_assert!((f.amplitude - 0.5 * product * t1.sin() * t2.sin()).abs() < 1e-12);
    }

    #[test]
    fn pumping_conserves_population(intensity in 0.1f64..100.0, clock in 0.0f64..1.0) {
        let exp = common::experiment("fig3.cfg");
        let mut m = exp.pumping.clone();
        m.intensity = intensity;
        m.zeeman_fill = m.lower_manifold_fill(clock);
        let s = pumping_scan(&m, &[0.0, 1e-3, 5e-3]).unwrap();
        prop_assert!(s.max_population_error < 1e-9);
    }

    #[test]
    fn scattering_falls_with_detunings(
        d in 1.0f64..100.0, dd in 0.1f64..50.0,
        di in 100.0f64..2000.0, ddi in 1.0f64..500.0,
    ) {
        let base = scattering_per_cycle(&scatter_params(d, di, 0.0)).r_total;
        prop_assert!(scattering_per_cycle(&scatter_params(d + dd, di, 0.0)).r_total < base);
        prop_assert!(scattering_per_cycle(&scatter_params(d, di + ddi, 0.0)).r_total < base);
    }

    #[test]
    fn counts_stay_in_range_and_records_round_trip(
        probs in prop::collection::vec(0.0f64..=1.0, 1..30),
        shots in 1u64..2000,
        seed in any::<u64>(),
        p_down in 0.5f64..=1.0,
        p_up in 0.0f64..0.1,
    ) {
        let det = DetectionModel { p_shelve_down: p_down, p_shelve_up: p_up, ..DetectionModel::ideal(shots) };
        let xs: Vec<f64> = (0..probs.len()).map(|i| i as f64 * 0.37 - 1.1).collect();
        let rec = synth_scan("x", "1", &xs, &probs, &det, Channel::Memory, seed).unwrap();
        for p in &rec.points {
            prop_assert!(p.successes >= 0.0 && p.successes <= shots as f64);
            prop_assert_eq!(p.successes.fract(), 0.0);
        }
        let back = ExperimentRecord::from_csv(&rec.to_csv().unwrap(), "mem").unwrap();
        prop_assert_eq!(back, rec);
    }

    #[test]
    fn sampling_is_repeatable(p in 0.0f64..=1.0, seed in any::<u64>(), stream in any::<u64>()) {
        let det = DetectionModel::ideal(300);
        prop_assert_eq!(
            sample_point(p, &det, Channel::Coolant, seed, stream).unwrap(),
            sample_point(p, &det, Channel::Coolant, seed, stream).unwrap()
        );
    }

    #[test]
    fn sideband_jacobian(
        t in 10e-6f64..40e-6,
        f in 5e5f64..1.5e6,
        a in (0.01f64..1.0, 0.01f64..1.0),
        w in (0.3f64..0.7, 0.3f64..0.7),
        shift in (-2e3f64..2e3, -2e3f64..2e3),
        blue in any::<bool>(),
        off in -1.5f64..1.5,
    ) {
        let p = [a.0, -f + shift.0, w.0 / t, a.1, f + shift.1, w.1 / t];
        let x = if blue { p[4] } else { p[1] } + off / t;
        let model = SidebandPairModel { pulse_duration: t };
        prop_assert!(gradient_mismatch(&model, x, &p) < 1e-6);
    }

    #[test]
    fn other_jacobians(
        fr in (0.05f64..0.5, -3.0f64..3.0, 0.2f64..0.8),
        phi in 0.0f64..TAU,
        dec in (0.2f64..1.0, 0.001f64..0.2),
        n in 0.0f64..20.0,
        rp in (1.0f64..100.0, 0.01f64..0.2, 1.0f64..200.0, 100.0f64..2000.0),
        t in 0.0f64..5e-3,
    ) {
        prop_assert!(gradient_mismatch(&FringeModel, phi, &[fr.0, fr.1, fr.2]) < 1e-6);
        prop_assert!(gradient_mismatch(&DecayModel, n, &[dec.0, dec.1]) < 1e-6);
        prop_assert!(gradient_mismatch(&ExpDecayModel, n, &[dec.0, dec.1]) < 1e-6);
        prop_assert!(gradient_mismatch(&RepumpModel, t, &[rp.0, rp.1, rp.2, TAU * rp.3]) < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn fits_ignore_point_order(seed in 0u64..1000, rotate in 1usize..39) {
        let fig1 = common::experiment("fig1.cfg");
        let fig2 = common::experiment("fig2.cfg");
        let fig3 = common::experiment("fig3.cfg");
        let dist = fig1.thermal(0.07).unwrap();
        let (sb, sb_fit) = fig1.thermometry(Mode::OutOfPhase, &dist, seed).unwrap();
        let (ram, ram_fit) = fig2.ramsey(&[GapOp::CoolingCycle; 3], seed).unwrap();
        let (rep, rep_fit) = fig3.repump_scan(seed).unwrap();

        let shuffle = |rec: &ExperimentRecord| {
            let mut r = rec.clone();
            let k = rotate % r.points.len();
            r.points.rotate_left(k);
            r.points.reverse();
            r
        };
        // Agreement to LM convergence, measured against the fitted uncertainty.
        let close = |a: &FitResult, b: &FitResult| {
            a.params.iter().zip(&b.params).zip(&a.sigmas).all(|((x, y), s)| (x - y).abs() <= 1e-6 * s)
        };
        prop_assert!(close(&sb_fit, &fit_sideband_scan(&shuffle(&sb)).unwrap()));
        prop_assert!(close(&ram_fit, &fit_ramsey_fringe(&shuffle(&ram)).unwrap()));
        prop_assert!(close(&rep_fit, &fit_repump_scan(&shuffle(&rep)).unwrap()));

        let mut data = DecayData::default();
        for n in 0..=10 {
            data.push(n as f64, 0.4 * 0.967f64.powi(n) + 0.003 * ((seed + n as u64) % 7) as f64, 0.01);
        }
        let mut rev = data.clone();
        rev.cycles.reverse();
        rev.amplitude.reverse();
        rev.sigma.reverse();
        prop_assert!(close(&fit_contrast_decay(&data).unwrap(), &fit_contrast_decay(&rev).unwrap()));
    }

    #[test]
    fn light_shift_phase_is_linear_in_pulse_count(pulses in 0usize..40) {
        let mut cfg = common::load("fig2.cfg");
        cfg.detection.noiseless = true;
        let exp = Experiment::new(cfg).unwrap();
        let ops = vec![GapOp::RepumpOnly; pulses];
        let rec = synth_ramsey_scan(&exp.ramsey_truth(&ops), &exp.phase_grid(), &exp.config.detection, 0).unwrap();
        let phase = fit_ramsey_fringe(&rec).unwrap().params[1];
        let want = wrap(pulses as f64 * exp.delta_q * exp.gap.tau_sigma);
        prop_assert!(wrap(phase - want).abs() < 1e-9, "fitted {} expected {}", phase, want);
    }
}

#[test]
fn binomial_counts_are_calibrated() {
    let p = common::binomial_calibration_pvalue(10_000, 17);
    assert!(p > 0.01, "KS p-value {p}");
}

/// Median fit lands within half a typical sigma of the truth and 1σ
/// intervals cover the truth 60-76% of the time.
fn calibration(truth: &[f64], fits: &[(Vec<f64>, Vec<f64>)]) -> Vec<(f64, f64)> {
    (0..truth.len())
        .map(|i| {
            let mut v: Vec<f64> = fits.iter().map(|f| f.0[i]).collect();
            let mut s: Vec<f64> = fits.iter().map(|f| f.1[i]).collect();
            v.sort_by(f64::total_cmp);
            s.sort_by(f64::total_cmp);
            let bias = (v[v.len() / 2] - truth[i]).abs() / s[s.len() / 2];
            let cover = fits.iter().filter(|f| (f.0[i] - truth[i]).abs() <= f.1[i]).count() as f64 / fits.len() as f64;
            (bias, cover)
        })
        .collect()
}

#[test]
fn ramsey_fit_is_unbiased_and_calibrated() {
    let exp = common::experiment("fig2.cfg");
    let ops = [GapOp::CoolingCycle; 5];
    let truth = exp.ramsey_truth(&ops);
    let prep = exp.config.detection.prep_clock_fraction;
    let det = &exp.config.detection;
    let scale = prep * (det.p_shelve_down - det.p_shelve_up);
    let want = [scale * truth.fringe.amplitude, truth.fringe.phase];
    let seeds: Vec<u64> = (0..200).collect();
    let fits = par_map(&seeds, |&s| {
        let f = exp.ramsey(&ops, s).unwrap().1;
        (f.params[..2].to_vec(), f.sigmas[..2].to_vec())
    });
    for (i, (bias, cover)) in calibration(&want, &fits).into_iter().enumerate() {
        assert!(bias < 0.5, "param {i}: median offset {bias} sigma");
        assert!((0.60..=0.76).contains(&cover), "param {i}: coverage {cover}");
    }
}

#[test]
fn repump_fit_is_unbiased() {
    let exp = common::experiment("fig3.cfg");
    let want = [21.0, 0.076, 60.0, TAU * 623.0];
    let seeds: Vec<u64> = (0..200).collect();
    let fits = par_map(&seeds, |&s| {
        let f = exp.repump_scan(s).unwrap().1;
        (f.params.clone(), f.sigmas.clone())
    });
    for (i, (bias, _)) in calibration(&want, &fits).into_iter().enumerate() {
        assert!(bias < 0.5, "param {i}: median offset {bias} sigma");
    }
}

#[test]
fn thermometry_is_unbiased() {
    let exp = common::experiment("fig1.cfg");
    let dist = exp.thermal(0.07).unwrap();
    let seeds: Vec<u64> = (0..200).collect();
    let fits = par_map(&seeds, |&s| {
        let d = exp.thermometry(Mode::OutOfPhase, &dist, s).unwrap().1.derived("nbar").unwrap().clone();
        (vec![d.value], vec![d.sigma])
    });
    let (bias, _) = calibration(&[0.07], &fits)[0];
    assert!(bias < 0.5, "median offset {bias} sigma");
}

#[test]
fn recorded_counts_are_integers_within_shots() {
    let exp = common::experiment("fig2.cfg");
    let (rec, _) = exp.ramsey(&[], 4).unwrap();
    assert!(rec
        .points
        .iter()
        .all(|p: &ScanPoint| p.successes.fract() == 0.0 && p.successes <= p.shots as f64));
}
