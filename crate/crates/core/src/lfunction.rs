//! Dirichlet L-functions `L(s, χ_j)` modulo a prime.
//!
//! Two evaluators:
//!
//! - truncated: `Σ_{m <= X} χ(m) m^{-s}`, the crude approximation whose error
//!   decays like `(|t|+1) √q log q / √X` on the critical line;
//! - reference: `L(s, χ) = q^{-s} Σ_{a=1}^{q-1} χ(a) ζ(s, a/q)`, exact apart
//!   from the Hurwitz error. The `q - 1` Hurwitz values are shared by every
//!   character, so a whole vector costs one transform on top of them.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::character::{CharacterIndex, PrimeModulus};
use crate::error::{Error, Result};
use crate::special::{hurwitz_zeta_with, power_neg, PrecisionPolicy};
use crate::sum::{ComplexSum, KahanSum};

pub const DEFAULT_EPSILON0: f64 = 0.05;

/// The point `s = 1/2 + it` together with the exponent `ε₀` of the
/// admissibility bound `|t| <= q^{1/4 - ε₀}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub t: f64,
    pub epsilon0: f64,
}

impl CriticalPoint {
    pub fn new(t: f64) -> Self {
        Self { t, epsilon0: DEFAULT_EPSILON0 }
    }

    pub fn with_epsilon0(t: f64, epsilon0: f64) -> Result<Self> {
        if !(epsilon0 > 0.0 && epsilon0 < 0.25) {
            return Err(Error::InvalidParameter(alloc::format!("epsilon0 = {epsilon0} must lie in (0, 1/4)")));
        }
        Ok(Self { t, epsilon0 })
    }

    pub fn s(&self) -> Complex64 {
        Complex64::new(0.5, self.t)
    }

    /// `|t| <= q^{1/4 - ε₀}`. Inadmissible points are still evaluated.
    pub fn is_admissible(&self, q: u64) -> bool {
        self.t.abs() <= (q as f64).powf(0.25 - self.epsilon0)
    }

    pub fn negated(&self) -> Self {
        Self { t: -self.t, ..*self }
    }
}

/// Which evaluator produced a value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Reference,
    /// Truncated Dirichlet sum; `None` selects `X = q^{3/2} (|t| + 1)`.
    Truncated(Option<f64>),
}

impl Method {
    /// The truncation length this method uses at `(q, t)`, if any.
    pub fn truncation(&self, q: u64, t: f64) -> Option<f64> {
        match *self {
            Method::Reference => None,
            Method::Truncated(Some(x)) => Some(x),
            Method::Truncated(None) => Some(default_truncation(q, t)),
        }
    }
}

/// `X = q^{3/2}(|t| + 1)`.
pub fn default_truncation(q: u64, t: f64) -> f64 {
    (q as f64).powf(1.5) * (t.abs() + 1.0)
}

/// `L(1/2 + it, χ_j)` for every primitive `χ_j`, `j = 1..=q-2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LVector {
    q: u64,
    point: CriticalPoint,
    method: Method,
    values: Vec<Complex64>,
}

impl LVector {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn point(&self) -> CriticalPoint {
        self.point
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn admissible(&self) -> bool {
        self.point.is_admissible(self.q)
    }

    /// Values in index order; entry `i` belongs to `χ_{i+1}`.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, j: CharacterIndex) -> Option<Complex64> {
        (!j.is_principal()).then(|| self.values.get(j.get() as usize - 1).copied()).flatten()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, Complex64)> + '_ {
        self.values.iter().enumerate().map(|(i, v)| (i as u64 + 1, *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn reject_principal(j: CharacterIndex) -> Result<()> {
    if j.is_principal() {
        Err(Error::PrincipalCharacter)
    } else {
        Ok(())
    }
}

fn check_truncation(x: f64) -> Result<u64> {
    if !(x >= 1.0) || !x.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!("truncation length X = {x} must be >= 1")));
    }
    Ok(x.floor() as u64)
}

/// `Σ_{m <= X} χ_j(m) m^{-1/2-it}`.
pub fn l_truncated(modulus: &PrimeModulus, j: CharacterIndex, point: &CriticalPoint, x: f64) -> Result<Complex64> {
    reject_principal(j)?;
    let len = check_truncation(x)?;
    let s = point.s();
    let mut acc = ComplexSum::new();
    for m in 1..=len {
        if let Some(a) = modulus.dlog(m) {
            acc.add(modulus.unit_root(j.get() * a as u64) * power_neg(m as f64, s));
        }
    }
    Ok(acc.value())
}

/// `L(1/2 + it, χ_j)` through the Hurwitz decomposition.
pub fn l_reference(modulus: &PrimeModulus, j: CharacterIndex, point: &CriticalPoint) -> Result<Complex64> {
    l_reference_at(modulus, j, point.s())
}

/// `L(s, χ_j)` through the Hurwitz decomposition, for any `s != 1`.
pub fn l_reference_at(modulus: &PrimeModulus, j: CharacterIndex, s: Complex64) -> Result<Complex64> {
    reject_principal(j)?;
    let policy = PrecisionPolicy::default();
    let q = modulus.q();
    let mut acc = ComplexSum::new();
    for a in 1..q {
        let z = hurwitz_zeta_with(s, a as f64 / q as f64, &policy)?;
        acc.add(modulus.char_value(j, a) * z);
    }
    Ok(acc.value() * power_neg(q as f64, s))
}

/// `L(s, χ_j)` for all `j = 0..q-2`, principal character included, by the
/// Hurwitz decomposition.
pub fn l_all_reference_at(modulus: &PrimeModulus, s: Complex64) -> Result<Vec<Complex64>> {
    let policy = PrecisionPolicy::default();
    let q = modulus.q();
    let mut by_residue = vec![Complex64::new(0.0, 0.0); q as usize];
    for (a, slot) in by_residue.iter_mut().enumerate().skip(1) {
        *slot = hurwitz_zeta_with(s, a as f64 / q as f64, &policy)?;
    }
    let scale = power_neg(q as f64, s);
    let mut out = modulus.all_character_sums_by_residue(&by_residue);
    for v in &mut out {
        *v *= scale;
    }
    Ok(out)
}

/// Truncated sums `Σ_{m <= X} χ_j(m) m^{-s}` for all `j = 0..q-2`.
pub fn l_all_truncated_at(modulus: &PrimeModulus, s: Complex64, x: f64) -> Result<Vec<Complex64>> {
    let len = check_truncation(x)?;
    let q = modulus.q();
    let mut acc = vec![ComplexSum::new(); q as usize];
    for m in 1..=len {
        let r = (m % q) as usize;
        if r != 0 {
            acc[r].add(power_neg(m as f64, s));
        }
    }
    let by_residue: Vec<Complex64> = acc.iter().map(ComplexSum::value).collect();
    Ok(modulus.all_character_sums_by_residue(&by_residue))
}

/// `L(s, χ_j)` for all `j = 0..q-2` by the chosen method; the default
/// truncation length uses `t = Im s`.
pub fn l_all_at(modulus: &PrimeModulus, s: Complex64, method: Method) -> Result<Vec<Complex64>> {
    match method.truncation(modulus.q(), s.im) {
        None => l_all_reference_at(modulus, s),
        Some(x) => l_all_truncated_at(modulus, s, x),
    }
}

/// The vector of `L(1/2 + it, χ_j)` over all primitive characters.
pub fn l_all(modulus: &PrimeModulus, point: &CriticalPoint, method: Method) -> Result<LVector> {
    let mut values = l_all_at(modulus, point.s(), method)?;
    values.remove(0);
    let method = match method {
        Method::Truncated(None) => Method::Truncated(Some(default_truncation(modulus.q(), point.t))),
        m => m,
    };
    Ok(LVector { q: modulus.q(), point: *point, method, values })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AfeRow {
    pub x: f64,
    /// Median over primitive characters of `|truncated - reference|`.
    pub median_error: f64,
    /// `median_error · √X / ((|t|+1) √q log q)`: the implied constant seen at this `X`.
    pub empirical_constant: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AfeProfile {
    pub q: u64,
    pub t: f64,
    pub rows: Vec<AfeRow>,
    /// Least-squares slope of `log(median_error)` against `log X`; `None` for fewer than two rows.
    pub slope: Option<f64>,
}

/// Median truncation error over all primitive characters for each `X` in an
/// ascending grid.
pub fn afe_error_profile(modulus: &PrimeModulus, point: &CriticalPoint, x_grid: &[f64]) -> Result<AfeProfile> {
    if x_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("X-grid must be strictly ascending".into()));
    }
    let reference = l_all(modulus, point, Method::Reference)?;
    let q = modulus.q() as f64;
    let shape = (point.t.abs() + 1.0) * q.sqrt() * q.ln();
    let mut rows = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        let truncated = l_all(modulus, point, Method::Truncated(Some(x)))?;
        let mut errors: Vec<f64> = truncated
            .values()
            .iter()
            .zip(reference.values())
            .map(|(a, b)| (a - b).norm())
            .collect();
        let median_error = median(&mut errors);
        rows.push(AfeRow { x, median_error, empirical_constant: median_error * x.sqrt() / shape });
    }
    let slope = log_log_slope(rows.iter().map(|r| (r.x, r.median_error)));
    Ok(AfeProfile { q: modulus.q(), t: point.t, rows, slope })
}

/// Median of a non-empty slice (mean of the middle pair for even lengths).
pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Ordinary least-squares slope of `ln y` on `ln x`.
pub fn log_log_slope<I: IntoIterator<Item = (f64, f64)>>(points: I) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.into_iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxy = KahanSum::new();
    let mut sxx = KahanSum::new();
    for (x, y) in &pts {
        sxy.add((x - mx) * (y - my));
        sxx.add((x - mx) * (x - mx));
    }
    Some(sxy.value() / sxx.value())
}
