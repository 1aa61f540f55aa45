//! Mollified mean values: the diagonal of the mollified first moment, the
//! second moment against `Π 𝒩_j(k-1) · 𝒬_{v+1}`, and the pure mollifier sums.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::twisted::{log_coefficients, twisted_main_terms, MainTermForm, TwistPair};
use super::{normalizer, MollifierTable};
use crate::character::PrimeModulus;
use crate::error::{Error, Result};
use crate::lfunction::{l_all, CriticalPoint, LVector, Method};
use crate::mollifier::{expand_coefficients, mollified_power_coefficients, DirichletPolynomial, MollifierParams};
use crate::sum::{ComplexSum, KahanSum};

fn all_windows(params: &MollifierParams) -> Vec<usize> {
    (1..=params.big_r()).collect()
}

fn check_pairs(x: &DirichletPolynomial, y: &DirichletPolynomial, cap: usize) -> Result<()> {
    let needed = x.len().saturating_mul(y.len());
    if needed > cap {
        return Err(Error::SupportBudgetExceeded { needed, cap });
    }
    Ok(())
}

/// `φ*(q) Σ_{a, m : am = b, m <= X} x_a y_b / √(abm) = φ*(q) Σ_{a | b, b/a <= X} x_a y_b / b`,
/// where `𝒩(t, χ, k-1) = Σ x_a χ(a) a^{-1/2-it}` and
/// `𝒩(-t, χ̄, k) = Σ y_b χ̄(b) b^{-1/2+it}`. The sum does not depend on `t`.
pub fn prop24_diagonal(params: &MollifierParams, x_len: f64, cap: usize) -> Result<f64> {
    let windows = all_windows(params);
    let x = expand_coefficients(params, params.k() - 1.0, &windows, cap)?;
    let y = expand_coefficients(params, params.k(), &windows, cap)?;
    check_pairs(&x, &y, cap)?;
    let mut acc = KahanSum::new();
    for (a, xa) in x.iter() {
        for (b, yb) in y.iter() {
            if b % a == 0 && ((b / a) as f64) <= x_len {
                acc.add(xa * yb / b as f64);
            }
        }
    }
    Ok((params.q() - 2) as f64 * acc.value())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prop24Report {
    pub q: u64,
    pub k: f64,
    pub t: f64,
    /// `Σ*_χ L(1/2+it, χ) 𝒩(t, χ, k-1) 𝒩(-t, χ̄, k)`
    pub lhs: Complex64,
    pub diagonal: f64,
    /// `lhs - diagonal`, measured rather than bounded.
    pub off_diagonal: Complex64,
    pub x_len: f64,
    pub normalizer: f64,
    pub diagonal_ratio: f64,
    pub lhs_ratio: f64,
}

/// The mollified first moment split into its diagonal and the rest. The
/// diagonal uses the truncation length `X` of the vector's method, or the
/// default `q^{3/2}(|t|+1)` for reference values.
pub fn prop24_check(modulus: &PrimeModulus, values: &LVector, params: &MollifierParams, cap: usize) -> Result<Prop24Report> {
    if params.q() != values.q() || modulus.q() != values.q() {
        return Err(Error::InvalidParameter("modulus, L-values and mollifier refer to different q".into()));
    }
    let q = values.q();
    let t = values.point().t;
    let k = params.k();
    let x_len = Method::Truncated(None).truncation(q, t).expect("truncated method has a length");
    let x_len = values.method().truncation(q, t).unwrap_or(x_len);
    let diagonal = prop24_diagonal(params, x_len, cap)?;
    let table = MollifierTable::new(params, modulus, t);
    let mut lhs = ComplexSum::new();
    for (i, &l) in values.values().iter().enumerate() {
        lhs.add(l * table.n_product(i, k - 1.0) * table.n_product_minus_conj(i, k));
    }
    let lhs = lhs.value();
    let norm = normalizer(q, k);
    Ok(Prop24Report {
        q,
        k,
        t,
        lhs,
        diagonal,
        off_diagonal: lhs - diagonal,
        x_len,
        normalizer: norm,
        diagonal_ratio: diagonal / norm,
        lhs_ratio: lhs.re / norm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prop25Report {
    pub q: u64,
    pub k: f64,
    pub t: f64,
    pub v: usize,
    /// `ℓ_{v+1}`, absent for `v = R`.
    pub ell_next: Option<u32>,
    /// `Σ*|L|² Π_{j<=v} |𝒩_j(t, χ, k-1)|² |𝒬_{v+1}(t, χ, k)|²`
    pub direct: f64,
    pub normalizer: f64,
    pub ratio: f64,
    /// `Σ_{a,b} (a,b) u_a u_b / (ab)`
    pub coefficient_sum: f64,
    /// `log((12/ℓ)^{2r_kℓ} ((r_kℓ)!)²)` for `ℓ = ℓ_{v+1}`; 0 for `v = R`.
    pub ln_scale: f64,
    /// The main terms carried through the coefficients:
    /// `scale · Σ_{a,b} (a,b) u_a u_b / (ab) · (S_1 + S_2)` with `S_1` at `(a/(a,b), b/(a,b))`.
    pub predicted_main: Complex64,
    pub support: usize,
}

fn gcd128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn prop25_check(
    modulus: &PrimeModulus,
    point: &CriticalPoint,
    params: &MollifierParams,
    v: usize,
    method: Method,
    cap: usize,
) -> Result<Prop25Report> {
    prop25_from(modulus, &l_all(modulus, point, method)?, params, v, MainTermForm::Limit, cap)
}

pub fn prop25_from(
    modulus: &PrimeModulus,
    values: &LVector,
    params: &MollifierParams,
    v: usize,
    form: MainTermForm,
    cap: usize,
) -> Result<Prop25Report> {
    if params.q() != values.q() || modulus.q() != values.q() {
        return Err(Error::InvalidParameter("modulus, L-values and mollifier refer to different q".into()));
    }
    let k = params.k();
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::InvalidParameter(alloc::format!("the mollified second moment needs 0 < k < 1, got {k}")));
    }
    if v > params.big_r() {
        return Err(Error::InvalidParameter(alloc::format!("v = {v} exceeds R = {}", params.big_r())));
    }
    let q = values.q();
    let t = values.point().t;
    let u = mollified_power_coefficients(params, v, cap)?;
    check_pairs(&u, &u, cap)?;

    let table = MollifierTable::new(params, modulus, t);
    let mut direct = KahanSum::new();
    for (i, &l) in values.values().iter().enumerate() {
        direct.add(l.norm_sqr() * table.capped_product(i, v, k - 1.0));
    }
    let direct = direct.value();

    // S_1 + S_2 at (h, b) = (1, 1); the twist only enters through -c_h log h - c_b log b
    let (s1, s2) = twisted_main_terms(q, t, TwistPair::UNIT, form)?;
    let base = s1 + s2;
    let (c_h, c_b) = log_coefficients(q, form);
    let mut weights = KahanSum::new();
    let mut main = ComplexSum::new();
    for (a, ua) in u.iter() {
        for (b, ub) in u.iter() {
            let d = gcd128(a, b);
            let w = ua * ub * d as f64 / (a as f64 * b as f64);
            weights.add(w);
            let logs = c_h * ((a / d) as f64).ln() + c_b * ((b / d) as f64).ln();
            main.add((base - logs) * w);
        }
    }
    let ln_scale = params.ln_power_scale(v);
    let norm = normalizer(q, k);
    Ok(Prop25Report {
        q,
        k,
        t,
        v,
        ell_next: (v < params.big_r()).then(|| params.ell_at(v + 1)),
        direct,
        normalizer: norm,
        ratio: direct / norm,
        coefficient_sum: weights.value(),
        ln_scale,
        predicted_main: main.value() * ln_scale.exp(),
        support: u.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prop26Report {
    pub q: u64,
    pub k: f64,
    pub t: f64,
    /// `Σ* Π_{j<=R} (|𝒩_j(t, χ, k)|² + |𝒬_j(t, χ, k)|²)`
    pub product_sum: f64,
    /// `Σ* Σ_{v=0}^{R} Π_{j<=v} |𝒩_j(t, χ, k)|² |𝒬_{v+1}(t, χ, k)|²`
    pub capped_sum: f64,
    pub normalizer: f64,
    pub product_ratio: f64,
    pub capped_ratio: f64,
}

/// The two pure mollifier sums; no L-values are involved.
pub fn prop26_check(modulus: &PrimeModulus, t: f64, params: &MollifierParams) -> Result<Prop26Report> {
    if params.q() != modulus.q() {
        return Err(Error::InvalidParameter("modulus and mollifier refer to different q".into()));
    }
    let k = params.k();
    let table = MollifierTable::new(params, modulus, t);
    let (mut product, mut capped) = (KahanSum::new(), KahanSum::new());
    for i in 0..table.len() {
        product.add(table.n_or_q_product(i));
        capped.add(table.capped_sum(i, k));
    }
    let q = modulus.q();
    let norm = normalizer(q, k);
    let (product_sum, capped_sum) = (product.value(), capped.value());
    Ok(Prop26Report {
        q,
        k,
        t,
        product_sum,
        capped_sum,
        normalizer: norm,
        product_ratio: product_sum / norm,
        capped_ratio: capped_sum / norm,
    })
}
