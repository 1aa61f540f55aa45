//! Acceptance suite: each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use lmoments::character::CharacterIndex;
use lmoments::lab::{
    lemma21_from, lemma22_from, moment_of, normalizer, prop24_diagonal, twisted_general_main, twisted_lhs_from,
    twisted_main_from, MainTermForm, TwistPair,
};
use lmoments::lfunction::{afe_error_profile, l_all, CriticalPoint, LVector, Method};
use lmoments::mollifier::{
    expand_coefficients, expand_power_coefficients, mollified_power_coefficients, n_factor, power_sums_all,
    WindowMode, DEFAULT_SUPPORT_CAP,
};
use lmoments::special::gamma;
use lmoments::{Complex64, MollifierParams, PrimeModulus};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};


struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn max_over_min(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::MIN, f64::max);
    let min = values.iter().cloned().fold(f64::MAX, f64::min);
    max / min
}

fn reference(modulus: &PrimeModulus, t: f64) -> LVector {
    l_all(modulus, &CriticalPoint::new(t), Method::Reference).expect("reference vector")
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_unit(rng: &mut StdRng, q: u64) -> u64 {
    loop {
        let n = rng.random_range(1..1_000_000u64);
        if n % q != 0 {
            return n;
        }
    }
}

/// The custom policy used throughout: `P_1 = {3, 5, 7}` with `ℓ_1 = 4`.
fn custom_policy() -> WindowMode {
    WindowMode::custom_with_ell(vec![7], vec![4])
}

fn policies() -> [(&'static str, WindowMode); 2] {
    [("canonical", WindowMode::Canonical), ("custom", custom_policy())]
}

fn orthogonality() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for q in [101u64, 1009] {
        let m = PrimeModulus::new(q).unwrap();
        for i in 0..100 {
            let a = random_unit(&mut rng, q);
            // every other pair is congruent
            let b = if i % 2 == 0 { a + q * rng.random_range(0..1000u64) } else { random_unit(&mut rng, q) };
            let mut sum = c(0.0, 0.0);
            for j in 0..q - 1 {
                let chi = CharacterIndex::new(j, &m).unwrap();
                sum += m.char_value(chi, a % q) * m.char_value(chi, b % q).conj();
            }
            let expected = if a % q == b % q { (q - 1) as f64 } else { 0.0 };
            worst = worst.max((sum - c(expected, 0.0)).norm());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst < 1e-9 && secs < 5.0, format!("max abs error {worst:.2e}, {secs:.2} s"))
}

fn dft_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for q in [101u64, 211] {
        let m = PrimeModulus::new(q).unwrap();
        for _ in 0..20 {
            let coeffs: Vec<(u64, Complex64)> = (0..60)
                .map(|_| (rng.random_range(1..q), c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
                .collect();
            let fast = m.all_character_sums(coeffs.iter().copied());
            let mut scale = 0.0f64;
            let mut err = 0.0f64;
            for (j, f) in fast.iter().enumerate() {
                let chi = CharacterIndex::new(j as u64, &m).unwrap();
                let naive: Complex64 = coeffs.iter().map(|&(n, z)| z * m.char_value(chi, n)).sum();
                scale = scale.max(naive.norm());
                err = err.max((f - naive).norm());
            }
            worst = worst.max(err / scale);
        }
    }
    outcome(worst < 1e-9, format!("max relative error {worst:.2e}"))
}

fn reflection() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..50 {
        let t = -20.0 + 40.0 * i as f64 / 49.0;
        let prod = gamma(c(0.5, -t)).unwrap() * gamma(c(0.5, t)).unwrap();
        let ratio = prod * ((std::f64::consts::PI * t).cosh() / std::f64::consts::PI);
        worst = worst.max((ratio - c(1.0, 0.0)).norm());
    }
    outcome(worst < 1e-11, format!("max |Γ(1/2-it)Γ(1/2+it)cosh(πt)/π - 1| = {worst:.2e} on 50 points"))
}

fn afe_shape() -> Outcome {
    let start = Instant::now();
    let q = 101u64;
    let m = PrimeModulus::new(q).unwrap();
    let grid: Vec<f64> = [1.0, 4.0, 16.0, 64.0].iter().map(|f| f * q as f64).collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for t in [0.0, 1.3] {
        let profile = afe_error_profile(&m, &CriticalPoint::new(t), &grid).unwrap();
        let slope = profile.slope.unwrap_or(f64::NAN);
        pass &= (-0.65..=-0.35).contains(&slope);
        parts.push(format!("t={t}: slope {slope:.3}"));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 30.0;
    outcome(pass, format!("{}, {secs:.2} s", parts.join(", ")))
}

const LEMMA_QS: [u64; 3] = [101, 401, 1009];
const LEMMA_TS: [f64; 2] = [0.0, 0.7];

fn lemma21_grid() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut min_slack = f64::INFINITY;
    let mut points = 0;
    for q in LEMMA_QS {
        let m = PrimeModulus::new(q).unwrap();
        for t in LEMMA_TS {
            let values = reference(&m, t);
            for k in [0.3, 0.5, 0.8, 2.0] {
                for (name, mode) in policies() {
                    let p = MollifierParams::new(k, 2, 1, q, mode).unwrap();
                    let r = lemma21_from(&m, &values, &p).unwrap();
                    points += 1;
                    min_slack = min_slack.min(r.slack_ratio);
                    if !r.holds {
                        failures.push(format!("q={q} k={k} t={t} {name}"));
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        failures.is_empty() && secs < 600.0,
        format!("{points} points, {} violations {failures:?}, min rhs/|lhs| {min_slack:.3}, {secs:.2} s", failures.len()),
    )
}

fn lemma22_stability() -> Outcome {
    let mut slack = std::collections::BTreeMap::<(String, String, String), Vec<f64>>::new();
    let mut finite = true;
    for q in LEMMA_QS {
        let m = PrimeModulus::new(q).unwrap();
        for t in LEMMA_TS {
            let values = reference(&m, t);
            for k in [0.3, 0.5, 0.8] {
                for (name, mode) in policies() {
                    let p = MollifierParams::new(k, 2, 1, q, mode).unwrap();
                    let r = lemma22_from(&m, &values, &p).unwrap();
                    finite &= r.slack_ratio.is_finite() && r.slack_ratio > 0.0;
                    slack.entry((format!("{k}"), format!("{t}"), name.to_string())).or_default().push(r.slack_ratio);
                }
            }
        }
    }
    let spreads: Vec<(String, f64)> =
        slack.iter().map(|((k, t, name), v)| (format!("k={k} t={t} {name}"), max_over_min(v))).collect();
    let (worst_name, worst) = spreads.iter().cloned().fold((String::new(), 0.0), |a, b| if b.1 > a.1 { b } else { a });
    outcome(finite && worst <= 3.0, format!("worst max/min across q {worst:.3} at {worst_name}"))
}

fn twisted_moment() -> Outcome {
    let start = Instant::now();
    let pairs = [(1, 1), (2, 3), (3, 5)];
    let mut pass = true;
    let mut parts = Vec::new();
    let small = PrimeModulus::new(101).unwrap();
    let large = PrimeModulus::new(5003).unwrap();
    for t in [0.0, 1.3] {
        let (vs, vl) = (reference(&small, t), reference(&large, t));
        for (h, b) in pairs {
            let pair = TwistPair::new(h, b).unwrap();
            let rs = twisted_main_from(&small, &vs, pair, MainTermForm::Limit).unwrap();
            let rl = twisted_main_from(&large, &vl, pair, MainTermForm::Limit).unwrap();
            let bound = if (h, b) == (1, 1) { 0.10 } else { 0.20 };
            pass &= rl.rel_deviation < rs.rel_deviation && rl.rel_deviation < bound;
            parts.push(format!("({h},{b}) t={t}: {:.4} -> {:.4}", rs.rel_deviation, rl.rel_deviation));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 300.0;
    outcome(pass, format!("rel deviation q=101 -> q=5003: {}; {secs:.2} s", parts.join("; ")))
}

fn limit_consistency() -> Outcome {
    let q = 1009u64;
    let t = 0.5;
    let m = PrimeModulus::new(q).unwrap();
    let values = reference(&m, t);
    let mut pass = true;
    let mut parts = Vec::new();
    for (h, b) in [(1, 1), (2, 3), (3, 5)] {
        let pair = TwistPair::new(h, b).unwrap();
        let limit = twisted_main_from(&m, &values, pair, MainTermForm::Limit).unwrap().main_total;
        let devs: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&d| (twisted_general_main(q, c(0.5, t), c(0.5, -t - d), pair).unwrap() - limit).norm())
            .collect();
        pass &= devs.windows(2).all(|w| w[1] < w[0]);
        parts.push(format!("({h},{b}): {:.2e} {:.2e} {:.2e}", devs[0], devs[1], devs[2]));
    }
    outcome(pass, format!("deviation at δ = 1e-2, 1e-3, 1e-4: {}", parts.join("; ")))
}

fn moment_scaling() -> Outcome {
    let start = Instant::now();
    let qs = [1009u64, 2003, 5003, 10007];
    let ks = [0.3, 0.5, 0.8, 1.0];
    let ts = [0.0, 0.7];
    let mut ratios = vec![vec![Vec::new(); ts.len()]; ks.len()];
    let mut worst_match = 0.0f64;
    for &q in &qs {
        let m = PrimeModulus::new(q).unwrap();
        for (ti, &t) in ts.iter().enumerate() {
            let values = reference(&m, t);
            for (ki, &k) in ks.iter().enumerate() {
                ratios[ki][ti].push(moment_of(&values, k) / normalizer(q, k));
            }
            if t == 0.0 {
                let predicted = twisted_main_from(&m, &values, TwistPair::UNIT, MainTermForm::Limit).unwrap().main_total.re
                    / normalizer(q, 1.0);
                let ratio = moment_of(&values, 1.0) / normalizer(q, 1.0);
                worst_match = worst_match.max((ratio - predicted).abs() / predicted);
            }
        }
    }
    let mut worst_spread = 0.0f64;
    let mut parts = Vec::new();
    for (ki, &k) in ks.iter().enumerate() {
        for (ti, &t) in ts.iter().enumerate() {
            let spread = max_over_min(&ratios[ki][ti]);
            worst_spread = worst_spread.max(spread);
            parts.push(format!("k={k} t={t}: {spread:.3}"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst_spread <= 2.0 && worst_match < 0.15 && secs < 900.0,
        format!(
            "max/min over q {}; k=1 t=0 worst mismatch with predicted {worst_match:.4}; {secs:.2} s",
            parts.join(", ")
        ),
    )
}

fn diagonal_positivity() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for q in [1009u64, 10007, 1_000_003] {
        for k in [1.5, 2.0, 3.0] {
            let p = MollifierParams::canonical(k, q).unwrap();
            let d = prop24_diagonal(&p, (q as f64).powf(1.5), DEFAULT_SUPPORT_CAP).unwrap();
            pass &= d >= (q - 2) as f64;
        }
    }
    parts.push("canonical q ∈ {1009, 10007, 1000003}, k ∈ {1.5, 2, 3}".to_string());
    for k in [1.5, 2.0] {
        for mode in [custom_policy(), WindowMode::custom_with_ell(vec![7, 13], vec![4, 2])] {
            let p = MollifierParams::new(k, 2, 1, 1009, mode).unwrap();
            let d = prop24_diagonal(&p, 1009f64.powf(1.5), DEFAULT_SUPPORT_CAP).unwrap();
            pass &= d >= 1007.0;
        }
    }
    parts.push("custom small windows at q = 1009".to_string());
    let mut worst = 0.0f64;
    for q in [101u64, 1009] {
        let m = PrimeModulus::new(q).unwrap();
        for t in [0.0, 0.7] {
            let values = reference(&m, t);
            let a = moment_of(&values, 1.0);
            let b = twisted_lhs_from(&m, &values, TwistPair::UNIT).unwrap();
            worst = worst.max((c(a, 0.0) - b).norm() / a);
        }
    }
    pass &= worst < 1e-9;
    outcome(pass, format!("diagonal >= φ*(q) on {}; moment(k=1) vs twisted sum rel diff {worst:.2e}", parts.join(" and ")))
}

fn expansion_duality() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    let mut worst = 0.0f64;
    let primes = [3u64, 5, 7, 11, 13, 17];
    for instance in 0..100 {
        let q = if instance % 2 == 0 { 101 } else { 211 };
        let m = PrimeModulus::new(q).unwrap();
        let windows = rng.random_range(1..=2usize);
        let mut bounds = Vec::new();
        let mut start = 0;
        for w in 0..windows {
            let end = rng.random_range(start + 1..=primes.len() - (windows - 1 - w));
            bounds.push(primes[end - 1]);
            start = end;
        }
        let ell: Vec<u32> = (0..windows).map(|_| 2 * rng.random_range(1..=3u32)).collect();
        let k = [0.3, 0.5, 0.8, 2.0][rng.random_range(0..4)];
        let p = MollifierParams::new(k, 2, 1, q, WindowMode::custom_with_ell(bounds, ell)).unwrap();
        let t = rng.random_range(-5.0..5.0);
        let chi = CharacterIndex::new(rng.random_range(0..q - 1), &m).unwrap();
        let sums = power_sums_all(&p, &m, t);
        let j = chi.get() as usize;
        let alpha = rng.random_range(-1.0..2.0);
        let all: Vec<usize> = (1..=p.big_r()).collect();
        let poly = expand_coefficients(&p, alpha, &all, DEFAULT_SUPPORT_CAP).unwrap();
        let direct = all.iter().fold(c(1.0, 0.0), |acc, &w| acc * n_factor(&p, w, sums[w - 1][j], alpha));
        worst = worst.max((poly.evaluate(&m, chi, t) - direct).norm() / direct.norm().max(1.0));
        // the power of the first window when its exponent keeps the support small
        if p.q_exponent(1) <= 12 {
            let power = expand_power_coefficients(&p, 0, DEFAULT_SUPPORT_CAP).unwrap();
            let direct = sums[0][j].powu(p.q_exponent(1));
            worst = worst.max((power.evaluate(&m, chi, t) - direct).norm() / direct.norm().max(1.0));
        }
    }
    let mut max_u = 0.0f64;
    let mut sets = 0;
    for k in [0.3, 0.5, 0.8] {
        for mode in [custom_policy(), WindowMode::custom_with_ell(vec![7, 13], vec![4, 2]), WindowMode::Canonical] {
            for q in [101u64, 1009] {
                let p = MollifierParams::new(k, 2, 1, q, mode.clone()).unwrap();
                for v in 0..=p.big_r() {
                    let u = mollified_power_coefficients(&p, v, DEFAULT_SUPPORT_CAP).unwrap();
                    max_u = max_u.max(u.iter().map(|(_, x)| x.abs()).fold(0.0, f64::max));
                    sets += 1;
                }
            }
        }
    }
    outcome(
        worst < 1e-9 && max_u <= 1.0,
        format!("100 instances, worst deviation {worst:.2e}; max |u_a| = {max_u} over {sets} coefficient sets"),
    )
}

fn performance() -> Outcome {
    let q = 10007u64;
    let start = Instant::now();
    let m = PrimeModulus::new(q).unwrap();
    let first = reference(&m, 0.0);
    let moments: Vec<f64> = [0.5, 1.0].iter().map(|&k| moment_of(&first, k)).collect();
    let secs = start.elapsed().as_secs_f64();
    let again = reference(&m, 0.0);
    let repeat: Vec<f64> = [0.5, 1.0].iter().map(|&k| moment_of(&again, k)).collect();
    let identical = first.values() == again.values() && moments.iter().zip(&repeat).all(|(a, b)| a.to_bits() == b.to_bits());
    outcome(secs < 60.0 && identical, format!("q = {q}: vector + moments in {secs:.2} s, bit-identical rerun: {identical}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("character orthogonality", orthogonality),
        ("all-character transform vs naive sums", dft_oracle),
        ("Γ reflection identity", reflection),
        ("truncation error slope", afe_shape),
        ("first Hölder chain on the full grid", lemma21_grid),
        ("second Hölder chain slack stability", lemma22_stability),
        ("twisted second moment main terms", twisted_moment),
        ("general-to-diagonal limit consistency", limit_consistency),
        ("moment scaling φ*(q)(log q)^{k²}", moment_scaling),
        ("diagonal positivity and two-path identity", diagonal_positivity),
        ("expansion duality and |u_a| <= 1", expansion_duality),
        ("performance and determinism at q = 10007", performance),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let status = if result.pass { "PASS" } else { "FAIL" };
        if !result.pass {
            failed += 1;
        }
        println!("criterion {:>2} {status} {name}: {} [{:.1} s]", i + 1, result.detail, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
