//! Mollifier apparatus: the ℓ-sequence, prime windows `P_j`, the window
//! power sums `𝒫_j(t, χ) = Σ_{p ∈ P_j} χ(p) p^{-1/2-it}`, truncated
//! exponentials `E_ℓ`, the factors `𝒩_j = E_{ℓ_j}(α𝒫_j)` and the correction
//! terms `𝒬_j = (12 max(1, k²) 𝒫_j / ℓ_j)^{r_k ℓ_j}`.
//!
//! Window indices `j` are 1-based throughout, matching `𝒫_1, …, 𝒫_R`.

mod poly;

pub use poly::{
    expand_coefficients, expand_power_coefficients, mollified_power_coefficients, normalized_power_coefficients,
    DirichletPolynomial, DEFAULT_SUPPORT_CAP,
};

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::arith::sieve_primes;
use crate::character::{CharacterIndex, PrimeModulus};
use crate::error::{Error, Result};
use crate::special::power_neg;

pub const DEFAULT_N: u32 = 2;
pub const DEFAULT_M: u32 = 1;

/// How the prime windows are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum WindowMode {
    /// `P_1` = odd primes `<= q^{1/ℓ_1²}`, `P_j` = primes in `(q^{1/ℓ_{j-1}²}, q^{1/ℓ_j²}]`.
    Canonical,
    /// Caller-supplied ascending upper bounds `B_1 < … < B_R`:
    /// `P_1` = odd primes `<= B_1`, `P_j` = primes in `(B_{j-1}, B_j]`.
    /// `ell` overrides the ℓ-values (one even value per window); when absent
    /// the first `R` terms of the ℓ-recurrence are used without the `10^M` cut.
    Custom { bounds: Vec<u64>, ell: Option<Vec<u32>> },
}

impl WindowMode {
    pub fn custom(bounds: Vec<u64>) -> Self {
        WindowMode::Custom { bounds, ell: None }
    }

    pub fn custom_with_ell(bounds: Vec<u64>, ell: Vec<u32>) -> Self {
        WindowMode::Custom { bounds, ell: Some(ell) }
    }

    pub fn is_canonical(&self) -> bool {
        matches!(self, WindowMode::Canonical)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MollifierParams {
    k: f64,
    n: u32,
    m: u32,
    q: u64,
    r_k: u32,
    ell: Vec<u32>,
    windows: Vec<Vec<u64>>,
    mode: WindowMode,
}

/// `r_k = ⌈1 + 1/k⌉ + 1` for `0 < k < 1` and `⌈k/(2k-1)⌉ + 1` for `k > 1`.
pub fn r_k(k: f64) -> Result<u32> {
    check_k(k)?;
    let r = if k < 1.0 { (1.0 + 1.0 / k).ceil() + 1.0 } else { (k / (2.0 * k - 1.0)).ceil() + 1.0 };
    Ok(r as u32)
}

fn check_k(k: f64) -> Result<()> {
    if !(k > 0.0) || !k.is_finite() || k == 1.0 {
        return Err(Error::InvalidParameter(alloc::format!("k = {k}: need k > 0 and k != 1")));
    }
    Ok(())
}

/// `2⌈N log x⌉`.
fn ell_step(n: u32, x: f64) -> u32 {
    2 * (n as f64 * x.ln()).ceil().max(0.0) as u32
}

/// The ℓ-recurrence `ℓ_1 = 2⌈N log log q⌉`, `ℓ_{j+1} = 2⌈N log ℓ_j⌉`, cut at
/// the last term exceeding `10^M`. A recurrence that stops decreasing above
/// the threshold never terminates and is rejected.
pub fn ell_sequence(n: u32, m: u32, q: u64) -> Result<Vec<u32>> {
    let threshold = 10f64.powi(m as i32);
    let mut out = Vec::new();
    let mut ell = ell_step(n, (q as f64).ln());
    while ell as f64 > threshold {
        if let Some(&prev) = out.last() {
            if ell >= prev {
                return Err(Error::InvalidParameter(alloc::format!(
                    "ℓ-sequence stalls at {ell} above 10^{m} (N = {n})"
                )));
            }
        }
        out.push(ell);
        ell = ell_step(n, ell as f64);
    }
    Ok(out)
}

/// The first `count` terms of the ℓ-recurrence with no threshold.
fn ell_prefix(n: u32, q: u64, count: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(count);
    let mut ell = ell_step(n, (q as f64).ln());
    for _ in 0..count {
        out.push(ell);
        ell = ell_step(n, ell as f64);
    }
    out
}

/// `p <= q^{1/ℓ²}` decided in log space.
fn below_cutoff(p: u64, q: u64, ell: u32) -> bool {
    (ell as f64).powi(2) * (p as f64).ln() <= (q as f64).ln()
}

impl MollifierParams {
    pub fn new(k: f64, n: u32, m: u32, q: u64, mode: WindowMode) -> Result<Self> {
        check_k(k)?;
        if !crate::arith::is_prime(q) || q < 5 {
            return Err(Error::NotPrime(q));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("N must be a positive integer".into()));
        }
        let r_k = r_k(k)?;
        let (ell, windows) = match &mode {
            WindowMode::Canonical => {
                let ell = ell_sequence(n, m, q)?;
                let windows = canonical_windows(q, &ell);
                (ell, windows)
            }
            WindowMode::Custom { bounds, ell } => {
                if bounds.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidParameter("custom window bounds must be strictly ascending".into()));
                }
                let ell = match ell {
                    Some(ell) => {
                        if ell.len() != bounds.len() {
                            return Err(Error::InvalidParameter(alloc::format!(
                                "{} ℓ-values given for {} windows",
                                ell.len(),
                                bounds.len()
                            )));
                        }
                        ell.clone()
                    }
                    None => ell_prefix(n, q, bounds.len()),
                };
                if ell.iter().any(|&l| l == 0 || l % 2 == 1) {
                    return Err(Error::InvalidParameter("every ℓ_j must be a positive even integer".into()));
                }
                (ell, custom_windows(bounds))
            }
        };
        Ok(Self { k, n, m, q, r_k, ell, windows, mode })
    }

    /// Canonical windows with `N = 2`, `M = 1`.
    pub fn canonical(k: f64, q: u64) -> Result<Self> {
        Self::new(k, DEFAULT_N, DEFAULT_M, q, WindowMode::Canonical)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn big_n(&self) -> u32 {
        self.n
    }

    pub fn big_m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn r_k(&self) -> u32 {
        self.r_k
    }

    /// Number of windows `R`.
    pub fn big_r(&self) -> usize {
        self.ell.len()
    }

    pub fn ell(&self) -> &[u32] {
        &self.ell
    }

    /// ℓ_j for `1 <= j <= R`.
    pub fn ell_at(&self, j: usize) -> u32 {
        self.ell[j - 1]
    }

    pub fn windows(&self) -> &[Vec<u64>] {
        &self.windows
    }

    /// P_j for `1 <= j <= R`.
    pub fn window(&self, j: usize) -> &[u64] {
        &self.windows[j - 1]
    }

    pub fn mode(&self) -> &WindowMode {
        &self.mode
    }

    /// Set when some window holds no prime (common for canonical windows at small `q`).
    pub fn has_empty_window(&self) -> bool {
        self.windows.iter().any(Vec::is_empty)
    }

    /// Exponent `r_k ℓ_j` of `𝒬_j`.
    pub fn q_exponent(&self, j: usize) -> u32 {
        self.r_k * self.ell_at(j)
    }

    /// `(12 max(1, k²) / ℓ_{v+1})^{2 r_k ℓ_{v+1}} ((r_k ℓ_{v+1})!)²` in log form,
    /// for `0 <= v < R`; for `v = R` (where `𝒬_{R+1} = 1`) the factor is 1.
    /// `max(1, k²) = 1` in the range `0 < k < 1` where the mean values use it.
    pub fn ln_power_scale(&self, v: usize) -> f64 {
        if v >= self.big_r() {
            return 0.0;
        }
        let ell = self.ell_at(v + 1) as f64;
        let e = self.q_exponent(v + 1);
        2.0 * e as f64 * (12.0 * self.k.powi(2).max(1.0) / ell).ln() + 2.0 * ln_factorial(e)
    }

    /// `ln(scale)/ln q` for each `v = 0..R-1`: the exponent ε with scale = q^ε.
    pub fn scale_table(&self) -> Vec<ScaleRow> {
        (0..self.big_r())
            .map(|v| {
                let ln_scale = self.ln_power_scale(v);
                ScaleRow { v, ell: self.ell_at(v + 1), ln_scale, epsilon: ln_scale / (self.q as f64).ln() }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleRow {
    pub v: usize,
    pub ell: u32,
    pub ln_scale: f64,
    pub epsilon: f64,
}

pub(crate) fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

fn canonical_windows(q: u64, ell: &[u32]) -> Vec<Vec<u64>> {
    let Some(&last) = ell.last() else {
        return Vec::new();
    };
    // ℓ decreases, so the last cutoff is the largest
    let limit = (q as f64).powf(1.0 / (last as f64).powi(2)).floor() as u64 + 1;
    let primes = sieve_primes(limit);
    ell.iter()
        .enumerate()
        .map(|(i, &l)| {
            primes
                .iter()
                .copied()
                .filter(|&p| p != 2 && below_cutoff(p, q, l) && (i == 0 || !below_cutoff(p, q, ell[i - 1])))
                .collect()
        })
        .collect()
}

fn custom_windows(bounds: &[u64]) -> Vec<Vec<u64>> {
    let primes = sieve_primes(bounds.last().copied().unwrap_or(0));
    bounds
        .iter()
        .enumerate()
        .map(|(i, &hi)| {
            let lo = if i == 0 { 2 } else { bounds[i - 1] };
            primes.iter().copied().filter(|&p| p > lo && p <= hi).collect()
        })
        .collect()
}

/// `E_ℓ(x) = Σ_{i=0}^{ℓ} x^i / i!`.
pub fn truncated_exp(ell: u32, x: Complex64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for i in (1..=ell).rev() {
        acc = acc * x / i as f64 + 1.0;
    }
    acc
}

/// `𝒫_j(t, χ)` for one window and one character.
pub fn power_sum(params: &MollifierParams, j: usize, modulus: &PrimeModulus, chi: CharacterIndex, t: f64) -> Complex64 {
    let s = Complex64::new(0.5, t);
    params
        .window(j)
        .iter()
        .map(|&p| modulus.char_value(chi, p) * power_neg(p as f64, s))
        .fold(Complex64::new(0.0, 0.0), |a, b| a + b)
}

/// `𝒫_j(t, χ_i)` for every window `j` (outer) and every character `i = 0..q-2` (inner).
pub fn power_sums_all(params: &MollifierParams, modulus: &PrimeModulus, t: f64) -> Vec<Vec<Complex64>> {
    let s = Complex64::new(0.5, t);
    params
        .windows()
        .iter()
        .map(|w| modulus.all_character_sums(w.iter().map(|&p| (p, power_neg(p as f64, s)))))
        .collect()
}

/// `𝒩_j = E_{ℓ_j}(α 𝒫_j)` given the value of `𝒫_j`.
pub fn n_factor(params: &MollifierParams, j: usize, power_sum: Complex64, alpha: f64) -> Complex64 {
    truncated_exp(params.ell_at(j), power_sum * alpha)
}

/// `𝒩(t, χ, α) = Π_{j=1}^{R} 𝒩_j(t, χ, α)`; the empty product is 1.
pub fn n_product(params: &MollifierParams, modulus: &PrimeModulus, chi: CharacterIndex, t: f64, alpha: f64) -> Complex64 {
    (1..=params.big_r())
        .map(|j| n_factor(params, j, power_sum(params, j, modulus, chi, t), alpha))
        .fold(Complex64::new(1.0, 0.0), |a, b| a * b)
}

/// `𝒬_j = (12 max(1, k²) 𝒫_j / ℓ_j)^{r_k ℓ_j}` for `j <= R`, and `𝒬_{R+1} = 1`.
pub fn q_factor(params: &MollifierParams, j: usize, power_sum: Complex64) -> Complex64 {
    if j > params.big_r() {
        return Complex64::new(1.0, 0.0);
    }
    let base = power_sum * (12.0 * params.k().powi(2).max(1.0) / params.ell_at(j) as f64);
    base.powu(params.q_exponent(j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn r_k_branches() {
        assert_eq!(r_k(0.5), Ok(4));
        assert_eq!(r_k(2.0), Ok(2));
        assert_eq!(r_k(0.3), Ok(6));
        assert_eq!(r_k(0.8), Ok(4));
        assert!(r_k(1.0).is_err());
        assert!(r_k(0.0).is_err());
        assert!(r_k(-1.0).is_err());
    }

    #[test]
    fn ell_sequence_for_large_prime() {
        // log log(10^6 + 3) = 2.6258… → ℓ_1 = 2⌈5.25⌉ = 12; ℓ_2 = 2⌈2 log 12⌉ = 10 fails "> 10"
        let p = MollifierParams::new(0.5, 2, 1, 1_000_003, WindowMode::Canonical).unwrap();
        assert_eq!(p.ell(), [12]);
        assert_eq!(p.big_r(), 1);
        // q^{1/144} ≈ 1.1 admits no prime
        assert!(p.has_empty_window());
    }

    #[test]
    fn desk_scale_canonical_apparatus_is_empty() {
        for q in [101, 401, 1009, 10007] {
            let p = MollifierParams::canonical(0.5, q).unwrap();
            assert_eq!(p.big_r(), 0);
            assert!(!p.has_empty_window());
        }
    }

    #[test]
    fn ell_sequence_properties() {
        for n in 1..=6 {
            for q in [1_000_003u64, 2_000_003, 4_294_967_291, 18_446_744_073_709_551_557] {
                if let Ok(seq) = ell_sequence(n, 1, q) {
                    assert!(seq.iter().all(|l| l % 2 == 0 && *l > 10));
                    assert!(seq.windows(2).all(|w| w[0] > w[1]));
                }
            }
        }
        // log log(2^64) ≈ 3.78: N = 6 gives ℓ_1 = ℓ_2 = 46
        assert!(ell_sequence(6, 1, 18_446_744_073_709_551_557).is_err());
        // N = 3: ℓ_1 = 2⌈11.4⌉ = 24, ℓ_2 = 2⌈9.53⌉ = 20, ℓ_3 = 2⌈8.99⌉ = 18, ℓ_4 = 2⌈8.67⌉ = 18 stalls too
        assert!(ell_sequence(3, 1, 18_446_744_073_709_551_557).is_err());
        // with 10^2 as threshold the same recurrence gives R = 0
        assert_eq!(ell_sequence(3, 2, 18_446_744_073_709_551_557), Ok(vec![]));
        // N = 2, M = 0: the recurrence sits at ℓ = 10 > 1 forever
        assert!(ell_sequence(2, 0, 1_000_003).is_err());
    }

    #[test]
    fn canonical_windows_are_disjoint_and_follow_cutoffs() {
        // log q ≈ 22.18: cutoffs q^{1/16} ≈ 4.0 and q^{1/4} ≈ 256
        let q = 4_294_967_291;
        let ell = [4, 2];
        let windows = canonical_windows(q, &ell);
        assert_eq!(windows[0], [3]);
        assert_eq!(windows[1].first(), Some(&5));
        assert_eq!(windows[1].last(), Some(&251));
        for (j, w) in windows.iter().enumerate() {
            for &pr in w {
                assert!(below_cutoff(pr, q, ell[j]));
                if j > 0 {
                    assert!(!below_cutoff(pr, q, ell[j - 1]));
                }
            }
        }
        assert!(canonical_windows(q, &[]).is_empty());
    }

    #[test]
    fn custom_windows_and_validation() {
        let p = MollifierParams::new(0.5, 2, 1, 101, WindowMode::custom_with_ell(vec![7, 13], vec![4, 6])).unwrap();
        assert_eq!(p.windows(), [vec![3, 5, 7], vec![11, 13]]);
        assert_eq!(p.big_r(), 2);
        assert_eq!(p.q_exponent(2), 24);

        let p = MollifierParams::new(0.5, 2, 1, 101, WindowMode::custom(vec![20])).unwrap();
        assert_eq!(p.window(1), [3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(p.ell(), [8]);

        assert!(MollifierParams::new(0.5, 2, 1, 101, WindowMode::custom(vec![13, 7])).is_err());
        assert!(MollifierParams::new(0.5, 2, 1, 101, WindowMode::custom_with_ell(vec![7], vec![3])).is_err());
        assert!(MollifierParams::new(0.5, 2, 1, 101, WindowMode::custom_with_ell(vec![7], vec![4, 4])).is_err());
        assert!(MollifierParams::new(1.0, 2, 1, 101, WindowMode::Canonical).is_err());
        assert!(MollifierParams::new(0.0, 2, 1, 101, WindowMode::Canonical).is_err());
        assert!(MollifierParams::new(0.5, 2, 1, 100, WindowMode::Canonical).is_err());
    }

    #[test]
    fn truncated_exp_values() {
        assert_eq!(truncated_exp(0, c(3.0, 4.0)), c(1.0, 0.0));
        assert_eq!(truncated_exp(2, c(1.0, 0.0)), c(2.5, 0.0));
        let x = c(0.3, 0.1);
        // remainder bound |x|^13/13! ≈ 1e-17
        assert!((truncated_exp(12, x) - x.exp()).norm() < 1e-9);
    }

    #[test]
    fn truncated_exp_positive_for_even_degree() {
        for ell in (2..=20).step_by(2) {
            for i in 0..=1000 {
                let x = -50.0 + 0.1 * i as f64;
                assert!(truncated_exp(ell, c(x, 0.0)).re > 0.0, "ℓ={ell} x={x}");
            }
        }
        // odd degree goes negative
        assert!(truncated_exp(3, c(-5.0, 0.0)).re < 0.0);
    }

    #[test]
    fn power_sums_and_factors() {
        let m = PrimeModulus::new(7).unwrap();
        let chi = CharacterIndex::new(1, &m).unwrap();
        let p = MollifierParams::new(0.5, 2, 1, 7, WindowMode::custom_with_ell(vec![5], vec![2])).unwrap();
        assert_eq!(p.window(1), [3, 5]);
        let want = m.char_value(chi, 3) / 3f64.sqrt() + m.char_value(chi, 5) / 5f64.sqrt();
        assert!((power_sum(&p, 1, &m, chi, 0.0) - want).norm() < 1e-15);
        let all = power_sums_all(&p, &m, 0.7);
        for i in 0..6 {
            let ci = CharacterIndex::new(i, &m).unwrap();
            assert!((all[0][i as usize] - power_sum(&p, 1, &m, ci, 0.7)).norm() < 1e-13);
        }

        assert_eq!(n_factor(&p, 1, c(0.0, 0.0), 0.5), c(1.0, 0.0));
        assert_eq!(q_factor(&p, 2, c(5.0, 0.0)), c(1.0, 0.0));
        assert_eq!(q_factor(&p, 1, c(0.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn q_factor_unit_base() {
        // k = 1/2, ℓ = 12, r_k = 4: (12·1/12)^{48} = 1
        let p = MollifierParams::new(0.5, 2, 1, 101, WindowMode::custom_with_ell(vec![7], vec![12])).unwrap();
        assert_eq!(p.q_exponent(1), 48);
        assert!((q_factor(&p, 1, c(1.0, 0.0)) - c(1.0, 0.0)).norm() < 1e-14);
        // k = 2 uses max(1, k²) = 4
        let p = MollifierParams::new(2.0, 2, 1, 101, WindowMode::custom_with_ell(vec![7], vec![12])).unwrap();
        assert!((q_factor(&p, 1, c(0.25, 0.0)) - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn n_product_single_window_hand_expansion() {
        // window {3}, ℓ = 2, α = 1, t = 0, real χ with χ(3) = 1
        let m = PrimeModulus::new(11).unwrap();
        // 3 = 2^8 mod 11, so χ_j(3) = 1 needs 8j ≡ 0 mod 10: j = 5 is the quadratic character
        let chi = CharacterIndex::new(5, &m).unwrap();
        assert!((m.char_value(chi, 3) - c(1.0, 0.0)).norm() < 1e-15);
        let p = MollifierParams::new(0.5, 2, 1, 11, WindowMode::custom_with_ell(vec![3], vec![2])).unwrap();
        let want = 1.0 + 1.0 / 3f64.sqrt() + 1.0 / 6.0;
        assert!((n_product(&p, &m, chi, 0.0, 1.0) - c(want, 0.0)).norm() < 1e-15);
        let empty = MollifierParams::canonical(0.5, 11).unwrap();
        assert_eq!(n_product(&empty, &m, chi, 0.3, 0.7), c(1.0, 0.0));
    }

    #[test]
    fn scale_table_reports_epsilon() {
        let p = MollifierParams::new(0.5, 2, 1, 101, WindowMode::custom_with_ell(vec![7], vec![12])).unwrap();
        let rows = p.scale_table();
        assert_eq!(rows.len(), 1);
        let want = 2.0 * 48.0 * (1.0f64).ln() + 2.0 * ln_factorial(48);
        assert!((rows[0].ln_scale - want).abs() < 1e-9);
        assert!((rows[0].epsilon - want / 101f64.ln()).abs() < 1e-12);
        assert_eq!(p.ln_power_scale(1), 0.0);
    }
}
