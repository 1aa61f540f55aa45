//! Complex special functions in binary64: Γ, ψ = Γ'/Γ, Hurwitz ζ, Riemann ζ
//! and ζ with one Euler factor removed.
//!
//! Γ and ψ shift the argument upward by the functional equation until
//! `|z| >= shift_threshold` and then sum the Stirling / asymptotic series;
//! arguments left of the critical strip go through reflection. Hurwitz ζ uses
//! Euler–Maclaurin summation with the cut point pushed past both the
//! threshold and `|s|`, which keeps the Bernoulli tail below `1e-20` for
//! `|Im s| <= 50`.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `B_{2k}` for `k = 1..=15`.
const BERNOULLI: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

pub const MAX_SERIES_TERMS: usize = BERNOULLI.len();

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionPolicy {
    /// Number of Bernoulli corrections (at least 8, at most [`MAX_SERIES_TERMS`]).
    pub euler_maclaurin_terms: usize,
    /// Minimum modulus of the shifted argument before the asymptotic series.
    pub shift_threshold: f64,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        Self { euler_maclaurin_terms: 12, shift_threshold: 12.0 }
    }
}

impl PrecisionPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(8..=MAX_SERIES_TERMS).contains(&self.euler_maclaurin_terms) {
            return Err(Error::InvalidParameter(alloc::format!(
                "euler_maclaurin_terms must lie in [8, {MAX_SERIES_TERMS}]"
            )));
        }
        if !(self.shift_threshold >= 10.0) {
            return Err(Error::InvalidParameter("shift_threshold must be >= 10".into()));
        }
        Ok(())
    }
}

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Stirling series for `ln Γ(w)`, `|w|` large and `Re w > 0`.
fn stirling_ln_gamma(w: Complex64, terms: usize) -> Complex64 {
    let half_ln_2pi = 0.5 * (2.0 * PI).ln();
    let mut acc = (w - 0.5) * w.ln() - w + half_ln_2pi;
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut pow = inv;
    for (k, b) in BERNOULLI.iter().enumerate().take(terms) {
        let two_k = 2.0 * (k + 1) as f64;
        acc += pow * (b / (two_k * (two_k - 1.0)));
        pow *= inv2;
    }
    acc
}

/// Γ(s).
pub fn gamma(s: Complex64) -> Result<Complex64> {
    gamma_with(s, &PrecisionPolicy::default())
}

pub fn gamma_with(s: Complex64, policy: &PrecisionPolicy) -> Result<Complex64> {
    if is_nonpositive_integer(s) {
        return Err(Error::Pole("gamma"));
    }
    if s.re < 0.5 {
        // Γ(s)Γ(1-s) = π / sin(πs)
        let reflected = gamma_with(1.0 - s, policy)?;
        return Ok(PI / ((s * PI).sin() * reflected));
    }
    let mut w = s;
    let mut prod = Complex64::new(1.0, 0.0);
    while w.norm() < policy.shift_threshold {
        prod *= w;
        w += 1.0;
    }
    Ok(stirling_ln_gamma(w, policy.euler_maclaurin_terms).exp() / prod)
}

/// ψ(s) = Γ'(s)/Γ(s).
pub fn digamma(s: Complex64) -> Result<Complex64> {
    digamma_with(s, &PrecisionPolicy::default())
}

pub fn digamma_with(s: Complex64, policy: &PrecisionPolicy) -> Result<Complex64> {
    if is_nonpositive_integer(s) {
        return Err(Error::Pole("digamma"));
    }
    if s.re < 0.0 {
        // ψ(1-s) - ψ(s) = π cot(πs)
        let reflected = digamma_with(1.0 - s, policy)?;
        let z = s * PI;
        return Ok(reflected - PI * z.cos() / z.sin());
    }
    let mut w = s;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm() < policy.shift_threshold {
        shift += w.inv();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut acc = w.ln() - 0.5 * inv;
    let mut pow = inv2;
    for (k, b) in BERNOULLI.iter().enumerate().take(policy.euler_maclaurin_terms) {
        acc -= pow * (b / (2.0 * (k + 1) as f64));
        pow *= inv2;
    }
    Ok(acc - shift)
}

/// Hurwitz ζ(s, a) for `a > 0`.
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Result<Complex64> {
    hurwitz_zeta_with(s, a, &PrecisionPolicy::default())
}

pub fn hurwitz_zeta_with(s: Complex64, a: f64, policy: &PrecisionPolicy) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole("zeta"));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!("Hurwitz parameter a = {a} must be positive")));
    }
    let cut = policy.shift_threshold.max(s.norm());
    let n_terms = (cut - a).ceil().max(0.0) as u64;

    let mut head = crate::sum::ComplexSum::new();
    for n in 0..n_terms {
        head.add(power_neg(n as f64 + a, s));
    }
    let w = n_terms as f64 + a;
    let w_neg_s = power_neg(w, s);
    let mut acc = head.value() + w_neg_s * w / (s - 1.0) + 0.5 * w_neg_s;

    // Σ B_{2k}/(2k)! · s(s+1)…(s+2k-2) · w^{-s-2k+1}
    let inv_w2 = 1.0 / (w * w);
    let mut rising = s;
    let mut pow = w_neg_s / w;
    let mut factorial = 2.0;
    for (k, b) in BERNOULLI.iter().enumerate().take(policy.euler_maclaurin_terms) {
        acc += rising * pow * (b / factorial);
        let m = 2.0 * (k + 1) as f64;
        rising *= (s + (m - 1.0)) * (s + m);
        pow *= inv_w2;
        factorial *= (m + 1.0) * (m + 2.0);
    }
    Ok(acc)
}

/// `x^{-s}` for real `x > 0`.
#[inline]
pub fn power_neg(x: f64, s: Complex64) -> Complex64 {
    (-s * x.ln()).exp()
}

/// Riemann ζ(s) = ζ(s, 1).
pub fn riemann_zeta(s: Complex64) -> Result<Complex64> {
    hurwitz_zeta(s, 1.0)
}

/// ζ with the Euler factor at the prime `q` removed: `(1 - q^{-s}) ζ(s)`.
pub fn zeta_q(s: Complex64, q: u64) -> Result<Complex64> {
    Ok((1.0 - power_neg(q as f64, s)) * riemann_zeta(s)?)
}
