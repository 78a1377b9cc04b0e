//! Wigner 3j / 6j symbols (Racah formulas) and hyperfine dipole line
//! strengths. Angular momenta are passed doubled (`two_j = 2 j`) so
//! half-integers stay exact.

fn factorial(n: i32) -> f64 {
    debug_assert!(n >= 0);
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn triangle(a: i32, b: i32, c: i32) -> bool {
    c >= (a - b).abs() && c <= a + b && (a + b + c) % 2 == 0
}

/// Triangle coefficient for doubled arguments.
fn delta(a: i32, b: i32, c: i32) -> f64 {
    factorial((a + b - c) / 2) * factorial((a - b + c) / 2) * factorial((-a + b + c) / 2)
        / factorial((a + b + c) / 2 + 1)
}

fn parity(k: i32) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn wigner_3j(j1: i32, j2: i32, j3: i32, m1: i32, m2: i32, m3: i32) -> f64 {
    if m1 + m2 + m3 != 0 || !triangle(j1, j2, j3) {
        return 0.0;
    }
    for (j, m) in [(j1, m1), (j2, m2), (j3, m3)] {
        if m.abs() > j || (j + m) % 2 != 0 {
            return 0.0;
        }
    }
    let pre = parity((j1 - j2 - m3) / 2)
        * (delta(j1, j2, j3)
            * factorial((j1 + m1) / 2)
            * factorial((j1 - m1) / 2)
            * factorial((j2 + m2) / 2)
            * factorial((j2 - m2) / 2)
            * factorial((j3 + m3) / 2)
            * factorial((j3 - m3) / 2))
            .sqrt();
    let kmin = 0.max((j2 - j3 - m1) / 2).max((j1 - j3 + m2) / 2);
    let kmax = ((j1 + j2 - j3) / 2).min((j1 - m1) / 2).min((j2 + m2) / 2);
    let mut sum = 0.0;
    for k in kmin..=kmax {
        sum += parity(k)
            / (factorial(k)
                * factorial((j3 - j2 + m1) / 2 + k)
                * factorial((j3 - j1 - m2) / 2 + k)
                * factorial((j1 + j2 - j3) / 2 - k)
                * factorial((j1 - m1) / 2 - k)
                * factorial((j2 + m2) / 2 - k));
    }
    pre * sum
}

pub fn wigner_6j(j1: i32, j2: i32, j3: i32, j4: i32, j5: i32, j6: i32) -> f64 {
    let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
    if triads.iter().any(|&(a, b, c)| !triangle(a, b, c)) {
        return 0.0;
    }
    let pre: f64 = triads.iter().map(|&(a, b, c)| delta(a, b, c)).product::<f64>().sqrt();
    let sums = triads.map(|(a, b, c)| (a + b + c) / 2);
    let tops = [
        (j1 + j2 + j4 + j5) / 2,
        (j2 + j3 + j5 + j6) / 2,
        (j3 + j1 + j6 + j4) / 2,
    ];
    let tmin = *sums.iter().max().expect("four triads");
    let tmax = *tops.iter().min().expect("three tops");
    let mut total = 0.0;
    for t in tmin..=tmax {
        let den: f64 = sums.iter().map(|&s| factorial(t - s)).product::<f64>()
            * tops.iter().map(|&u| factorial(u - t)).product::<f64>();
        total += parity(t) * factorial(t + 1) / den;
    }
    pre * total
}

/// Relative strength of the dipole transition `|J F M> -> |J' F' M'>` in a
/// hyperfine-structured atom with nuclear spin `I` (all doubled).
/// Normalized so that the strengths out of any ground sublevel, summed over
/// all excited sublevels and polarizations, equal `(2J'+1)/(2J+1)`.
pub fn line_strength(two_j: i32, two_jp: i32, two_i: i32, two_f: i32, two_m: i32, two_fp: i32, two_mp: i32) -> f64 {
    let six = wigner_6j(two_j, two_jp, 2, two_fp, two_f, two_i);
    let three = wigner_3j(two_f, 2, two_fp, two_m, two_mp - two_m, -two_mp);
    (two_jp + 1) as f64 * (two_f + 1) as f64 * (two_fp + 1) as f64 * six * six * three * three
}

/// Spontaneous-decay branching ratio `|J' F' M'> -> |J F M>`; sums to one
/// over all `(F, M)` of the lower level.
pub fn branching_ratio(two_jp: i32, two_j: i32, two_i: i32, two_fp: i32, two_mp: i32, two_f: i32, two_m: i32) -> f64 {
    let six = wigner_6j(two_jp, two_j, 2, two_f, two_fp, two_i);
    let three = wigner_3j(two_fp, 2, two_f, two_mp, two_m - two_mp, -two_m);
    (two_j + 1) as f64 * (two_f + 1) as f64 * (two_fp + 1) as f64 * six * six * three * three
}
