//! The twisted second moment `Σ*_χ L(s, χ) L(s', χ̄) χ(h) χ̄(b)` against its
//! explicit main terms, both for general `(s, s')` and on the diagonal
//! `s' = 1 - s̄` of the critical line.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::arith::gcd;
use crate::character::{CharacterIndex, PrimeModulus};
use crate::error::{Error, Result};
use crate::lfunction::{l_all, l_all_at, CriticalPoint, LVector, Method};
use crate::special::{digamma, gamma, power_neg, riemann_zeta, zeta_q, EULER_GAMMA};
use crate::sum::ComplexSum;

/// A twist `χ(h) χ̄(b)` with `(h, b) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwistPair {
    pub h: u64,
    pub b: u64,
}

impl TwistPair {
    pub const UNIT: TwistPair = TwistPair { h: 1, b: 1 };

    pub fn new(h: u64, b: u64) -> Result<Self> {
        if h == 0 || b == 0 || gcd(h, b) != 1 {
            return Err(Error::InvalidParameter(alloc::format!("twist ({h}, {b}) needs positive coprime entries")));
        }
        Ok(Self { h, b })
    }

    /// `(hb, q) = 1`.
    pub fn check(&self, q: u64) -> Result<()> {
        if gcd(self.h, self.b) != 1 || self.h % q == 0 || self.b % q == 0 || self.h == 0 || self.b == 0 {
            return Err(Error::TwistNotCoprime { h: self.h, b: self.b, q });
        }
        Ok(())
    }

    pub fn swapped(&self) -> Self {
        Self { h: self.b, b: self.h }
    }
}

/// Which closed form is used for the `t' → -t` limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MainTermForm {
    /// The limit of the general main terms, carried out in full.
    #[default]
    Limit,
    /// The limit as usually printed: no Euler-constant terms and `φ(q) log h`
    /// in place of `φ(q)(1 - 1/q) log h`.
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwistedMomentReport {
    pub q: u64,
    pub t: f64,
    pub pair: TwistPair,
    pub form: MainTermForm,
    pub lhs: Complex64,
    /// The `t`-independent part of the main term.
    pub s1_term: Complex64,
    /// The digamma and `tan(iπt)` part.
    pub s2_term: Complex64,
    pub main_total: Complex64,
    pub abs_deviation: f64,
    pub rel_deviation: f64,
    /// `(|t|+1)² ((h+b) √q + hb)`
    pub error_budget: f64,
}

/// `Σ*_χ |L(1/2 + it, χ)|² χ(h) χ̄(b)`.
pub fn twisted_lhs(modulus: &PrimeModulus, point: &CriticalPoint, pair: TwistPair, method: Method) -> Result<Complex64> {
    pair.check(modulus.q())?;
    twisted_lhs_from(modulus, &l_all(modulus, point, method)?, pair)
}

pub fn twisted_lhs_from(modulus: &PrimeModulus, values: &LVector, pair: TwistPair) -> Result<Complex64> {
    pair.check(modulus.q())?;
    let q = modulus.q();
    let mut acc = ComplexSum::new();
    for (j, l) in values.iter() {
        let chi = CharacterIndex::new(j, modulus)?;
        let twist = modulus.char_value(chi, pair.h % q) * modulus.char_value(chi, pair.b % q).conj();
        acc.add(twist * l.norm_sqr());
    }
    Ok(acc.value())
}

/// Coefficients of `log h` and `log b` in `S_1` (with a minus sign).
pub(crate) fn log_coefficients(q: u64, form: MainTermForm) -> (f64, f64) {
    let qf = q as f64;
    let phi = qf - 1.0;
    match form {
        MainTermForm::Limit => (phi * (1.0 - 1.0 / qf), phi * phi / qf),
        MainTermForm::Printed => (phi, phi * phi / qf),
    }
}

/// `(S_1, S_2)`, each already divided by `h^{1/2-it} b^{1/2+it}`.
pub fn twisted_main_terms(q: u64, t: f64, pair: TwistPair, form: MainTermForm) -> Result<(Complex64, Complex64)> {
    pair.check(q)?;
    let qf = q as f64;
    let phi = qf - 1.0;
    let phi2_q = phi * phi / qf;
    let ln_h = (pair.h as f64).ln();
    let ln_b = (pair.b as f64).ln();
    let ln_q = qf.ln();
    let ln_q_2pi = (qf / (2.0 * core::f64::consts::PI)).ln();
    let (c_h, c_b) = log_coefficients(q, form);
    let s1 = match form {
        MainTermForm::Limit => phi * (1.0 - 1.0 / qf) * EULER_GAMMA + phi * ln_q / qf + phi2_q * (EULER_GAMMA + ln_q_2pi),
        MainTermForm::Printed => phi * ln_q / qf + phi2_q * ln_q_2pi,
    } - c_h * ln_h
        - c_b * ln_b;
    let psi = digamma(Complex64::new(0.5, t))?;
    // (π/2) tan(iπt) = (π/2) i tanh(πt)
    let tan_term = Complex64::new(0.0, core::f64::consts::FRAC_PI_2 * (core::f64::consts::PI * t).tanh());
    let s2 = (psi - tan_term) * phi2_q;
    let s = Complex64::new(0.5, t);
    let inv_d = power_neg(pair.h as f64, s.conj()) * power_neg(pair.b as f64, s);
    Ok((inv_d * s1, inv_d * s2))
}

/// Compares `Σ*|L|² χ(h) χ̄(b)` at `1/2 + it` with the closed-form limit.
pub fn twisted_main(modulus: &PrimeModulus, point: &CriticalPoint, pair: TwistPair, method: Method) -> Result<TwistedMomentReport> {
    pair.check(modulus.q())?;
    twisted_main_from(modulus, &l_all(modulus, point, method)?, pair, MainTermForm::Limit)
}

pub fn twisted_main_from(
    modulus: &PrimeModulus,
    values: &LVector,
    pair: TwistPair,
    form: MainTermForm,
) -> Result<TwistedMomentReport> {
    let q = modulus.q();
    let t = values.point().t;
    let lhs = twisted_lhs_from(modulus, values, pair)?;
    let (s1_term, s2_term) = twisted_main_terms(q, t, pair, form)?;
    let main_total = s1_term + s2_term;
    let abs_deviation = (lhs - main_total).norm();
    let (h, b) = (pair.h as f64, pair.b as f64);
    Ok(TwistedMomentReport {
        q,
        t,
        pair,
        form,
        lhs,
        s1_term,
        s2_term,
        main_total,
        abs_deviation,
        rel_deviation: abs_deviation / main_total.norm(),
        error_budget: (t.abs() + 1.0).powi(2) * ((h + b) * (q as f64).sqrt() + h * b),
    })
}

/// Both sides of the general twisted second moment at `(s, s')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralTwist {
    pub lhs: Complex64,
    pub main: Complex64,
    pub abs_deviation: f64,
    pub rel_deviation: f64,
}

fn check_strip(s: Complex64, s_prime: Complex64) -> Result<()> {
    let inside = |z: Complex64| z.re > 0.0 && z.re < 1.0;
    if !inside(s) || !inside(s_prime) {
        return Err(Error::InvalidParameter("need 0 < Re s, Re s' < 1".into()));
    }
    if s + s_prime == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole("ζ_q(s + s') at s + s' = 1"));
    }
    Ok(())
}

/// The general main terms
///
/// `φ(q) ζ_q(s+s') / (h^{s'} b^s)
///  + φ(q)² (2π)^{s+s'-1} Γ(1-s) Γ(1-s') cos(π(s-s')/2) ζ(2-s-s') / (π q^{s+s'} h^{1-s} b^{1-s'})`.
pub fn twisted_general_main(q: u64, s: Complex64, s_prime: Complex64, pair: TwistPair) -> Result<Complex64> {
    pair.check(q)?;
    check_strip(s, s_prime)?;
    let one = Complex64::new(1.0, 0.0);
    let pi = core::f64::consts::PI;
    let phi = (q - 1) as f64;
    let (h, b) = (pair.h as f64, pair.b as f64);
    let sum = s + s_prime;
    let diagonal = zeta_q(sum, q)? * phi * power_neg(h, s_prime) * power_neg(b, s);
    let gammas = gamma(one - s)? * gamma(one - s_prime)?;
    let cosine = ((s - s_prime) * (pi / 2.0)).cos();
    let off = power_neg(2.0 * pi, one - sum) * power_neg(q as f64, sum) * power_neg(h, one - s) * power_neg(b, one - s_prime)
        * gammas
        * cosine
        * riemann_zeta(Complex64::new(2.0, 0.0) - sum)?
        * (phi * phi / pi);
    Ok(diagonal + off)
}

/// `Σ*_χ L(s, χ) L(s', χ̄) χ(h) χ̄(b)` against [`twisted_general_main`].
pub fn twisted_general(
    modulus: &PrimeModulus,
    s: Complex64,
    s_prime: Complex64,
    pair: TwistPair,
    method: Method,
) -> Result<GeneralTwist> {
    let q = modulus.q();
    let main = twisted_general_main(q, s, s_prime, pair)?;
    let at_s = l_all_at(modulus, s, method)?;
    let at_s_prime = l_all_at(modulus, s_prime, method)?;
    let mut acc = ComplexSum::new();
    for j in 1..q - 1 {
        let chi = CharacterIndex::new(j, modulus)?;
        let bar = chi.conj(modulus).get() as usize;
        let twist = modulus.char_value(chi, pair.h % q) * modulus.char_value(chi, pair.b % q).conj();
        acc.add(at_s[j as usize] * at_s_prime[bar] * twist);
    }
    let lhs = acc.value();
    let abs_deviation = (lhs - main).norm();
    Ok(GeneralTwist { lhs, main, abs_deviation, rel_deviation: abs_deviation / main.norm() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfunction::l_reference;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pair_validation() {
        assert!(TwistPair::new(2, 4).is_err());
        assert!(TwistPair::new(0, 1).is_err());
        let p = TwistPair::new(5, 3).unwrap();
        assert_eq!(p.check(5), Err(Error::TwistNotCoprime { h: 5, b: 3, q: 5 }));
        assert!(p.check(7).is_ok());
        assert_eq!(p.swapped(), TwistPair { h: 3, b: 5 });
        let m = PrimeModulus::new(5).unwrap();
        assert!(twisted_lhs(&m, &CriticalPoint::new(0.0), p, Method::Reference).is_err());
    }

    #[test]
    fn untwisted_sum_is_real_positive() {
        let m = PrimeModulus::new(5).unwrap();
        let v = twisted_lhs(&m, &CriticalPoint::new(0.0), TwistPair::UNIT, Method::Reference).unwrap();
        assert!(v.re > 0.0 && v.im.abs() < 1e-12);
        let m = PrimeModulus::new(211).unwrap();
        let v = twisted_lhs(&m, &CriticalPoint::new(2.3), TwistPair::UNIT, Method::Reference).unwrap();
        assert!(v.re > 0.0 && v.im.abs() < 1e-9 * v.re);
    }

    #[test]
    fn swapping_the_twist_conjugates() {
        let m = PrimeModulus::new(101).unwrap();
        let values = l_all(&m, &CriticalPoint::new(0.4), Method::Reference).unwrap();
        let a = twisted_lhs_from(&m, &values, TwistPair::new(2, 3).unwrap()).unwrap();
        let b = twisted_lhs_from(&m, &values, TwistPair::new(3, 2).unwrap()).unwrap();
        assert_eq!(a, b.conj());
    }

    #[test]
    fn twisted_lhs_matches_naive_loop() {
        let q = 101;
        let m = PrimeModulus::new(q).unwrap();
        let point = CriticalPoint::new(0.0);
        let pair = TwistPair::new(2, 3).unwrap();
        let mut naive = c(0.0, 0.0);
        for j in 1..q - 1 {
            let chi = CharacterIndex::new(j, &m).unwrap();
            let l = l_reference(&m, chi, &point).unwrap();
            naive += m.char_value(chi, 2) * m.char_value(chi, 3).conj() * l.norm_sqr();
        }
        let fast = twisted_lhs(&m, &point, pair, Method::Reference).unwrap();
        assert!((fast - naive).norm() < 1e-9 * naive.norm().max(1.0));
    }

    #[test]
    fn s2_at_t_zero_is_digamma_block() {
        let q = 101;
        let pair = TwistPair::new(2, 3).unwrap();
        for form in [MainTermForm::Limit, MainTermForm::Printed] {
            let (_, s2) = twisted_main_terms(q, 0.0, pair, form).unwrap();
            let psi_half = -EULER_GAMMA - 2.0 * core::f64::consts::LN_2;
            let expected = 100.0 * 100.0 / 101.0 * psi_half / 6f64.sqrt();
            assert!((s2 - c(expected, 0.0)).norm() < 1e-10 * expected.abs());
        }
    }

    #[test]
    fn limit_form_differs_from_printed_by_euler_terms() {
        let q = 1009u64;
        let pair = TwistPair::new(3, 5).unwrap();
        let t = 0.9;
        let (a1, a2) = twisted_main_terms(q, t, pair, MainTermForm::Limit).unwrap();
        let (b1, b2) = twisted_main_terms(q, t, pair, MainTermForm::Printed).unwrap();
        assert_eq!(a2, b2);
        let phi = 1008.0;
        let bracket = 2.0 * EULER_GAMMA * phi * phi / q as f64 + phi / q as f64 * 3f64.ln();
        let s = c(0.5, t);
        let inv_d = power_neg(3.0, s.conj()) * power_neg(5.0, s);
        assert!((a1 - b1 - inv_d * bracket).norm() < 1e-9 * a1.norm());
    }

    #[test]
    fn general_main_symmetry() {
        // swapping (s, h) with (s', b) leaves the formula unchanged, and
        // conjugating s, s' conjugates it
        let q = 1009;
        let (s, sp) = (c(0.6, 1.3), c(0.45, -0.2));
        let pair = TwistPair::new(2, 7).unwrap();
        let a = twisted_general_main(q, s, sp, pair).unwrap();
        let b = twisted_general_main(q, sp, s, pair.swapped()).unwrap();
        assert!((a - b).norm() < 1e-12 * a.norm());
        let cj = twisted_general_main(q, s.conj(), sp.conj(), pair).unwrap();
        assert!((a.conj() - cj).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn general_main_rejects_pole_and_strip() {
        let pair = TwistPair::UNIT;
        assert!(matches!(twisted_general_main(101, c(0.5, 1.0), c(0.5, -1.0), pair), Err(Error::Pole(_))));
        assert!(twisted_general_main(101, c(1.0, 1.0), c(0.5, 0.0), pair).is_err());
        assert!(twisted_general_main(101, c(0.5, 1.0), c(0.0, 0.0), pair).is_err());
    }

    #[test]
    fn general_main_approaches_limit() {
        let q = 1009;
        let t = 0.5;
        for pair in [TwistPair::UNIT, TwistPair::new(2, 3).unwrap(), TwistPair::new(5, 3).unwrap()] {
            let (s1, s2) = twisted_main_terms(q, t, pair, MainTermForm::Limit).unwrap();
            let limit = s1 + s2;
            let mut last = f64::INFINITY;
            for delta in [1e-2, 1e-3, 1e-4, 1e-5] {
                let g = twisted_general_main(q, c(0.5, t), c(0.5, -t - delta), pair).unwrap();
                let dev = (g - limit).norm();
                assert!(dev < last);
                // first order in δ
                assert!(dev < 50.0 * delta * limit.norm(), "pair={pair:?} δ={delta} dev={dev}");
                last = dev;
            }
        }
    }

    #[test]
    fn general_twist_matches_main_off_the_line() {
        let m = PrimeModulus::new(1009).unwrap();
        let r = twisted_general(&m, c(0.6, 0.0), c(0.55, 0.0), TwistPair::UNIT, Method::Reference).unwrap();
        assert!(r.rel_deviation < 0.2, "{r:?}");
        assert!(r.lhs.im.abs() < 1e-9 * r.lhs.re);
    }
}
