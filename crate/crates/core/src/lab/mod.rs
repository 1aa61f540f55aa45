//! Experiments over the primitive characters of one prime modulus.
//!
//! Everything here sums over `χ_1, …, χ_{q-2}` (the principal character is
//! left out) with compensated summation. The checks come in two shapes:
//! exact inequalities, reported with a `holds` flag, and asymptotic
//! statements with unknown constants, reported as ratios to
//! `φ*(q) (log q)^{k²}`.

mod inequality;
mod mean_values;
mod twisted;

pub use inequality::{lemma21_check, lemma21_from, lemma22_check, lemma22_from, InequalityReport, LEMMA22_CONSTANT};
pub use mean_values::{
    prop24_check, prop24_diagonal, prop25_check, prop25_from, prop26_check, Prop24Report, Prop25Report, Prop26Report,
};
pub use twisted::{
    twisted_general, twisted_general_main, twisted_lhs, twisted_lhs_from, twisted_main, twisted_main_from, twisted_main_terms, GeneralTwist,
    MainTermForm, TwistPair, TwistedMomentReport,
};

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::character::{CharacterIndex, PrimeModulus};
use crate::error::Result;
use crate::lfunction::{l_all, CriticalPoint, LVector, Method};
use crate::mollifier::{n_factor, power_sums_all, q_factor, MollifierParams};
use crate::sum::KahanSum;

/// `φ*(q) (log q)^{k²}`.
pub fn normalizer(q: u64, k: f64) -> f64 {
    (q - 2) as f64 * (q as f64).ln().powf(k * k)
}

/// `|z|^{2k}`, with `|z|^0 = 1` even at `z = 0`.
fn abs_pow(z: Complex64, k: f64) -> f64 {
    if k == 0.0 {
        1.0
    } else {
        z.norm_sqr().powf(k)
    }
}

/// `Σ*_χ |L(1/2 + it, χ)|^{2k}`.
pub fn moment(modulus: &PrimeModulus, point: &CriticalPoint, k: f64, method: Method) -> Result<f64> {
    check_k_nonnegative(k)?;
    Ok(moment_of(&l_all(modulus, point, method)?, k))
}

/// The `2k`-th moment of an already computed vector; `k = 0` gives `q - 2`.
pub fn moment_of(values: &LVector, k: f64) -> f64 {
    let mut acc = KahanSum::new();
    for &v in values.values() {
        acc.add(abs_pow(v, k));
    }
    acc.value()
}

fn check_k_nonnegative(k: f64) -> Result<()> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(crate::Error::InvalidParameter(alloc::format!("k = {k} must be a finite number >= 0")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub q: u64,
    pub k: f64,
    pub t: f64,
    pub moment: f64,
    /// `φ*(q) (log q)^{k²}`
    pub normalizer: f64,
    pub ratio: f64,
    pub admissible: bool,
}

/// One `(q, k, t)` triple of a sweep; failures stay attached to their triple.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub q: u64,
    pub k: f64,
    pub t: f64,
    pub result: Result<SweepRow>,
}

/// Moments for every `(q, t)` pair and every `k`, one L-vector per `(q, t)`.
/// Rows follow the input order `q`, then `k`, then `t`.
pub fn sweep(qs: &[u64], ks: &[f64], ts: &[f64], method: Method) -> Vec<SweepOutcome> {
    let mut out = Vec::with_capacity(qs.len() * ks.len() * ts.len());
    for &q in qs {
        let modulus = PrimeModulus::new(q);
        let vectors: Vec<Result<LVector>> = ts
            .iter()
            .map(|&t| match &modulus {
                Ok(m) => l_all(m, &CriticalPoint::new(t), method),
                Err(e) => Err(e.clone()),
            })
            .collect();
        for &k in ks {
            for (&t, values) in ts.iter().zip(&vectors) {
                let result = values.clone().and_then(|v| sweep_row(&v, k));
                out.push(SweepOutcome { q, k, t, result });
            }
        }
    }
    out
}

/// The sweep row of one precomputed vector.
pub fn sweep_row(values: &LVector, k: f64) -> Result<SweepRow> {
    check_k_nonnegative(k)?;
    let q = values.q();
    let moment = moment_of(values, k);
    let normalizer = normalizer(q, k);
    Ok(SweepRow { q, k, t: values.point().t, moment, normalizer, ratio: moment / normalizer, admissible: values.admissible() })
}

/// Window power sums `𝒫_j(±t, χ)` for every primitive character, with the
/// per-character mollifier factors built from them.
pub(crate) struct MollifierTable<'a> {
    params: &'a MollifierParams,
    modulus: &'a PrimeModulus,
    /// `[window][j - 1]` at `+t`
    plus: Vec<Vec<Complex64>>,
    /// `[window][j - 1]` at `-t`
    minus: Vec<Vec<Complex64>>,
}

impl<'a> MollifierTable<'a> {
    pub(crate) fn new(params: &'a MollifierParams, modulus: &'a PrimeModulus, t: f64) -> Self {
        let strip = |mut sums: Vec<Vec<Complex64>>| {
            for w in &mut sums {
                w.remove(0);
            }
            sums
        };
        let plus = strip(power_sums_all(params, modulus, t));
        let minus = if t == 0.0 { plus.clone() } else { strip(power_sums_all(params, modulus, -t)) };
        Self { params, modulus, plus, minus }
    }

    pub(crate) fn len(&self) -> usize {
        self.modulus.phi_star() as usize
    }

    fn big_r(&self) -> usize {
        self.params.big_r()
    }

    /// Position of `χ̄` for the character at position `i` (`i = j - 1`).
    fn conj_pos(&self, i: usize) -> usize {
        let j = CharacterIndex::new(i as u64 + 1, self.modulus).expect("index in range");
        j.conj(self.modulus).get() as usize - 1
    }

    /// `𝒩_w(t, χ, α)` for window `w` (1-based).
    pub(crate) fn n_plus(&self, w: usize, i: usize, alpha: f64) -> Complex64 {
        n_factor(self.params, w, self.plus[w - 1][i], alpha)
    }

    /// `𝒩_w(-t, χ̄, α)`.
    pub(crate) fn n_minus_conj(&self, w: usize, i: usize, alpha: f64) -> Complex64 {
        n_factor(self.params, w, self.minus[w - 1][self.conj_pos(i)], alpha)
    }

    /// `𝒬_w(t, χ, k)` for `1 <= w <= R + 1`.
    pub(crate) fn q_plus(&self, w: usize, i: usize) -> Complex64 {
        if w > self.big_r() {
            return Complex64::new(1.0, 0.0);
        }
        q_factor(self.params, w, self.plus[w - 1][i])
    }

    /// `𝒩(t, χ, α) = Π_j 𝒩_j(t, χ, α)`.
    pub(crate) fn n_product(&self, i: usize, alpha: f64) -> Complex64 {
        (1..=self.big_r()).fold(Complex64::new(1.0, 0.0), |acc, w| acc * self.n_plus(w, i, alpha))
    }

    /// `𝒩(-t, χ̄, α)`.
    pub(crate) fn n_product_minus_conj(&self, i: usize, alpha: f64) -> Complex64 {
        (1..=self.big_r()).fold(Complex64::new(1.0, 0.0), |acc, w| acc * self.n_minus_conj(w, i, alpha))
    }

    /// `Π_{j<=R} (|𝒩_j(t, χ, k)|² + |𝒬_j(t, χ, k)|²)`.
    pub(crate) fn n_or_q_product(&self, i: usize) -> f64 {
        let k = self.params.k();
        (1..=self.big_r()).map(|w| self.n_plus(w, i, k).norm_sqr() + self.q_plus(w, i).norm_sqr()).product()
    }

    /// `Π_{j<=v} |𝒩_j(t, χ, α)|² · |𝒬_{v+1}(t, χ, k)|²`.
    pub(crate) fn capped_product(&self, i: usize, v: usize, alpha: f64) -> f64 {
        let head: f64 = (1..=v).map(|w| self.n_plus(w, i, alpha).norm_sqr()).product();
        head * self.q_plus(v + 1, i).norm_sqr()
    }

    /// `Σ_{v=0}^{R} Π_{j<=v} |𝒩_j(t, χ, α)|² · |𝒬_{v+1}(t, χ, k)|²`.
    pub(crate) fn capped_sum(&self, i: usize, alpha: f64) -> f64 {
        let mut acc = KahanSum::new();
        for v in 0..=self.big_r() {
            acc.add(self.capped_product(i, v, alpha));
        }
        acc.value()
    }
}
