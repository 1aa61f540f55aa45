//! Sparse Dirichlet polynomials `Σ_n c_n χ(n) n^{-1/2-it}` with real
//! coefficients, and the expansions of `𝒩`, `𝒫^{r_k ℓ}` into them.
//!
//! The `t`-dependence is kept out of the coefficients: a polynomial is
//! evaluated at `(t, χ)` by attaching `χ(n) n^{-1/2-it}` to each stored `c_n`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::MollifierParams;
use crate::character::{CharacterIndex, PrimeModulus};
use crate::error::{Error, Result};
use crate::special::power_neg;

/// Default support budget for one expansion.
pub const DEFAULT_SUPPORT_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletPolynomial {
    coeffs: BTreeMap<u128, f64>,
    /// Primes the support is built from (ascending).
    primes: Vec<u64>,
}

impl DirichletPolynomial {
    /// The constant polynomial 1.
    pub fn one() -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(1, 1.0);
        Self { coeffs, primes: Vec::new() }
    }

    pub fn coefficient(&self, n: u128) -> f64 {
        self.coeffs.get(&n).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u128, f64)> + '_ {
        self.coeffs.iter().map(|(&n, &c)| (n, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `n` in the support (0 for the zero polynomial).
    pub fn length_bound(&self) -> u128 {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// `Σ_n c_n χ(n) n^{-1/2-it}`.
    pub fn evaluate(&self, modulus: &PrimeModulus, chi: CharacterIndex, t: f64) -> Complex64 {
        let s = Complex64::new(0.5, t);
        let mut acc = crate::sum::ComplexSum::new();
        for (&n, &c) in &self.coeffs {
            acc.add(modulus.char_value_wide(chi, n) * power_neg(n as f64, s) * c);
        }
        acc.value()
    }

    /// Values at every character `χ_j`, `j = 0..q-2`.
    pub fn evaluate_all(&self, modulus: &PrimeModulus, t: f64) -> Vec<Complex64> {
        let s = Complex64::new(0.5, t);
        let q = modulus.q() as u128;
        modulus.all_character_sums(self.coeffs.iter().map(|(&n, &c)| ((n % q) as u64, power_neg(n as f64, s) * c)))
    }

    /// Dirichlet convolution, failing instead of truncating when the product
    /// support could exceed `cap`.
    pub fn mul(&self, other: &Self, cap: usize) -> Result<Self> {
        let needed = self.len().saturating_mul(other.len());
        if needed > cap && self.len() > 1 && other.len() > 1 {
            return Err(Error::SupportBudgetExceeded { needed, cap });
        }
        let mut coeffs = BTreeMap::new();
        for (&a, &x) in &self.coeffs {
            for (&b, &y) in &other.coeffs {
                let n = a.checked_mul(b).ok_or(Error::Overflow("Dirichlet polynomial support"))?;
                *coeffs.entry(n).or_insert(0.0) += x * y;
            }
        }
        if coeffs.len() > cap {
            return Err(Error::SupportBudgetExceeded { needed: coeffs.len(), cap });
        }
        let mut primes: Vec<u64> = self.primes.iter().chain(&other.primes).copied().collect();
        primes.sort_unstable();
        primes.dedup();
        Ok(Self { coeffs, primes })
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        for c in self.coeffs.values_mut() {
            *c *= factor;
        }
        self
    }
}

/// Number of exponent vectors over `r` primes with total degree in `[lo, hi]`.
fn monomial_count(r: usize, lo: u32, hi: u32) -> u128 {
    if r == 0 {
        return u128::from(lo == 0);
    }
    // Σ_d C(d + r - 1, r - 1)
    (lo..=hi).fold(0u128, |acc, d| acc.saturating_add(binomial(d as u128 + r as u128 - 1, r as u128 - 1)))
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

struct Monomial {
    n: u128,
    degree: u32,
    /// `Π e_p!`
    repetition: f64,
}

/// All `n = Π p^{e_p}` over `primes` with `lo <= Σ e_p <= hi`.
fn monomials(primes: &[u64], lo: u32, hi: u32, cap: usize) -> Result<Vec<Monomial>> {
    let count = monomial_count(primes.len(), lo, hi);
    if count > cap as u128 {
        return Err(Error::SupportBudgetExceeded { needed: usize::try_from(count).unwrap_or(usize::MAX), cap });
    }
    let mut out = Vec::with_capacity(count as usize);
    fn walk(primes: &[u64], lo: u32, hi: u32, n: u128, degree: u32, repetition: f64, out: &mut Vec<Monomial>) -> Result<()> {
        let Some((&p, rest)) = primes.split_first() else {
            if degree >= lo {
                out.push(Monomial { n, degree, repetition });
            }
            return Ok(());
        };
        let first = if rest.is_empty() { lo.saturating_sub(degree) } else { 0 };
        let mut power = n;
        let mut fact = repetition;
        for e in 0..=hi - degree {
            if e >= first {
                walk(rest, lo, hi, power, degree + e, fact, out)?;
            }
            if e < hi - degree {
                power = power.checked_mul(p as u128).ok_or(Error::Overflow("Dirichlet polynomial support"))?;
                fact *= (e + 1) as f64;
            }
        }
        Ok(())
    }
    walk(primes, lo, hi, 1, 0, 1.0, &mut out)?;
    Ok(out)
}

fn check_window(params: &MollifierParams, j: usize) -> Result<()> {
    if j == 0 || j > params.big_r() {
        return Err(Error::InvalidParameter(alloc::format!("window index {j} outside 1..={}", params.big_r())));
    }
    Ok(())
}

/// Coefficients `α^{Ω(n)}/w(n)` of `E_ℓ(α 𝒫)` over one window, `Ω(n) <= ℓ`,
/// `w(n) = Π e_p!`.
fn window_exp(primes: &[u64], ell: u32, alpha: f64, cap: usize) -> Result<DirichletPolynomial> {
    let mut coeffs = BTreeMap::new();
    for mono in monomials(primes, 0, ell, cap)? {
        coeffs.insert(mono.n, alpha.powi(mono.degree as i32) / mono.repetition);
    }
    if alpha == 0.0 {
        coeffs.retain(|_, c| *c != 0.0);
    }
    Ok(DirichletPolynomial { coeffs, primes: primes.to_vec() })
}

/// Expansion of `Π_{j ∈ windows} E_{ℓ_j}(α 𝒫_j(t, χ))` into `Σ x_n χ(n) n^{-1/2-it}`.
///
/// Window indices are 1-based; an empty list gives the constant 1.
pub fn expand_coefficients(params: &MollifierParams, alpha: f64, windows: &[usize], cap: usize) -> Result<DirichletPolynomial> {
    let mut needed: u128 = 1;
    for &j in windows {
        check_window(params, j)?;
        needed = needed.saturating_mul(monomial_count(params.window(j).len(), 0, params.ell_at(j)));
    }
    if needed > cap as u128 {
        return Err(Error::SupportBudgetExceeded { needed: usize::try_from(needed).unwrap_or(usize::MAX), cap });
    }
    let mut acc = DirichletPolynomial::one();
    for &j in windows {
        acc = acc.mul(&window_exp(params.window(j), params.ell_at(j), alpha, cap)?, cap)?;
    }
    Ok(acc)
}

/// Expansion of `𝒫_{v+1}^{r_k ℓ_{v+1}}`: coefficients `(r_k ℓ)!/w(n)` on the
/// `n` made of exactly `r_k ℓ` primes from `P_{v+1}`. Requires `v < R`.
pub fn expand_power_coefficients(params: &MollifierParams, v: usize, cap: usize) -> Result<DirichletPolynomial> {
    let norm = normalized_power_coefficients(params, v, cap)?;
    let e = params.q_exponent(v + 1);
    let mut coeffs = BTreeMap::new();
    for (n, c) in norm.iter() {
        // multinomial (e)!/w(n) = e! · (1/w(n)), exact while it stays below 2^53
        let value = factorial(e) * c;
        if !value.is_finite() {
            return Err(Error::Overflow("multinomial coefficient"));
        }
        coeffs.insert(n, value.round());
    }
    Ok(DirichletPolynomial { coeffs, primes: norm.primes })
}

fn factorial(n: u32) -> f64 {
    (2..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// `𝒫_{v+1}^{r_k ℓ_{v+1}} / (r_k ℓ_{v+1})!`: coefficients `1/w(n)`.
pub fn normalized_power_coefficients(params: &MollifierParams, v: usize, cap: usize) -> Result<DirichletPolynomial> {
    check_window(params, v + 1)?;
    let e = params.q_exponent(v + 1);
    let primes = params.window(v + 1);
    let mut coeffs = BTreeMap::new();
    if !primes.is_empty() {
        for mono in monomials(primes, e, e, cap)? {
            coeffs.insert(mono.n, 1.0 / mono.repetition);
        }
    }
    Ok(DirichletPolynomial { coeffs, primes: primes.to_vec() })
}

/// The normalised coefficients `u_a` of `Π_{j<=v} 𝒩_j(t, χ, k-1) · 𝒬_{v+1}(t, χ, k)`:
///
/// `Π_{j<=v} 𝒩_j(k-1) · 𝒬_{v+1} = (12 max(1,k²)/ℓ_{v+1})^{r_k ℓ_{v+1}} (r_k ℓ_{v+1})! Σ_a u_a χ(a) a^{-1/2-it}`
///
/// for `v < R`; for `v = R` the `𝒬` factor is 1 and `u` is the expansion of `𝒩(t, χ, k-1)`.
pub fn mollified_power_coefficients(params: &MollifierParams, v: usize, cap: usize) -> Result<DirichletPolynomial> {
    if v > params.big_r() {
        return Err(Error::InvalidParameter(alloc::format!("v = {v} exceeds R = {}", params.big_r())));
    }
    let windows: Vec<usize> = (1..=v).collect();
    let head = expand_coefficients(params, params.k() - 1.0, &windows, cap)?;
    if v == params.big_r() {
        return Ok(head);
    }
    head.mul(&normalized_power_coefficients(params, v, cap)?, cap)
}
