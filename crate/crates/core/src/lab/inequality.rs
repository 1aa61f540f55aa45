//! The two Hölder-type chains that bound the `2k`-th moment by mollified
//! second moments, checked numerically over all primitive characters.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::{abs_pow, MollifierTable};
use crate::character::PrimeModulus;
use crate::error::{Error, Result};
use crate::lfunction::{l_all, CriticalPoint, LVector, Method};
use crate::mollifier::MollifierParams;
use crate::sum::{ComplexSum, KahanSum};

/// Constant used for the `≪` of the second chain when setting `holds`.
pub const LEMMA22_CONSTANT: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub q: u64,
    pub k: f64,
    pub t: f64,
    pub lhs: Complex64,
    /// `(value, exponent)`; `rhs = Π value^exponent`.
    pub rhs_factors: Vec<(f64, f64)>,
    pub rhs: f64,
    /// The constant in `|lhs| <= constant · rhs`.
    pub constant: f64,
    pub holds: bool,
    /// `rhs / |lhs|`
    pub slack_ratio: f64,
    /// Number of windows `R` of the mollifier.
    pub windows: usize,
}

fn report(values: &LVector, k: f64, lhs: Complex64, rhs_factors: Vec<(f64, f64)>, constant: f64, windows: usize) -> InequalityReport {
    let rhs = if rhs_factors.iter().any(|&(v, _)| v == 0.0) {
        0.0
    } else {
        rhs_factors.iter().map(|&(v, e)| e * v.ln()).sum::<f64>().exp()
    };
    InequalityReport {
        q: values.q(),
        k,
        t: values.point().t,
        lhs,
        rhs,
        constant,
        holds: lhs.norm() <= constant * rhs,
        slack_ratio: rhs / lhs.norm(),
        rhs_factors,
        windows,
    }
}

fn check_table(modulus: &PrimeModulus, values: &LVector, params: &MollifierParams) -> Result<()> {
    if modulus.q() != values.q() || params.q() != values.q() {
        return Err(Error::InvalidParameter("modulus, L-values and mollifier refer to different q".into()));
    }
    Ok(())
}

/// First chain. `lhs = Σ*_χ L(1/2+it, χ) 𝒩(t, χ, k-1) 𝒩(-t, χ̄, k)`; with
/// `A = Σ*|L|^{2k}`, `B = Σ*|L|² |𝒩(t, χ, k-1)|²` and
/// `C = Σ* Π_j (|𝒩_j(t, χ, k)|² + |𝒬_j(t, χ, k)|²)` the right side is
/// `A^{1/2} B^{(1-k)/2} C^{k/2}` for `0 < k < 1` and `A^{1/(2k)} C^{(2k-1)/(2k)}`
/// for `k > 1`. `holds` compares `|lhs|` with the right side.
pub fn lemma21_check(modulus: &PrimeModulus, point: &CriticalPoint, params: &MollifierParams, method: Method) -> Result<InequalityReport> {
    lemma21_from(modulus, &l_all(modulus, point, method)?, params)
}

pub fn lemma21_from(modulus: &PrimeModulus, values: &LVector, params: &MollifierParams) -> Result<InequalityReport> {
    check_table(modulus, values, params)?;
    let k = params.k();
    let table = MollifierTable::new(params, modulus, values.point().t);
    let mut lhs = ComplexSum::new();
    let (mut a, mut b, mut c) = (KahanSum::new(), KahanSum::new(), KahanSum::new());
    for (i, &l) in values.values().iter().enumerate() {
        let n_low = table.n_product(i, k - 1.0);
        lhs.add(l * n_low * table.n_product_minus_conj(i, k));
        a.add(abs_pow(l, k));
        c.add(table.n_or_q_product(i));
        if k < 1.0 {
            b.add(l.norm_sqr() * n_low.norm_sqr());
        }
    }
    let factors = if k < 1.0 {
        vec![(a.value(), 0.5), (b.value(), (1.0 - k) / 2.0), (c.value(), k / 2.0)]
    } else {
        vec![(a.value(), 1.0 / (2.0 * k)), (c.value(), (2.0 * k - 1.0) / (2.0 * k))]
    };
    Ok(report(values, k, lhs.value(), factors, 1.0, params.big_r()))
}

/// Second chain, `0 < k < 1`. `lhs = Σ*|L|^{2k}`; the right side is
/// `A^k B^{1-k}` with
/// `A = Σ*|L|² Σ_{v=0}^{R} Π_{j<=v} |𝒩_j(t, χ, k-1)|² |𝒬_{v+1}(t, χ, k)|²` and
/// `B = Σ* Σ_{v=0}^{R} Π_{j<=v} |𝒩_j(t, χ, k)|² |𝒬_{v+1}(t, χ, k)|²`.
/// `holds` uses [`LEMMA22_CONSTANT`]; the unknown implied constant is what
/// `slack_ratio` tracks.
pub fn lemma22_check(modulus: &PrimeModulus, point: &CriticalPoint, params: &MollifierParams, method: Method) -> Result<InequalityReport> {
    lemma22_from(modulus, &l_all(modulus, point, method)?, params)
}

pub fn lemma22_from(modulus: &PrimeModulus, values: &LVector, params: &MollifierParams) -> Result<InequalityReport> {
    check_table(modulus, values, params)?;
    let k = params.k();
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::InvalidParameter(alloc::format!("the second chain needs 0 < k < 1, got {k}")));
    }
    let table = MollifierTable::new(params, modulus, values.point().t);
    let (mut lhs, mut a, mut b) = (KahanSum::new(), KahanSum::new(), KahanSum::new());
    for (i, &l) in values.values().iter().enumerate() {
        lhs.add(abs_pow(l, k));
        a.add(l.norm_sqr() * table.capped_sum(i, k - 1.0));
        b.add(table.capped_sum(i, k));
    }
    let factors = vec![(a.value(), k), (b.value(), 1.0 - k)];
    Ok(report(values, k, Complex64::new(lhs.value(), 0.0), factors, LEMMA22_CONSTANT, params.big_r()))
}
