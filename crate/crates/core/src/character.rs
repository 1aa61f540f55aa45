//! Dirichlet characters modulo a prime.
//!
//! Characters are indexed through the discrete logarithm to the smallest
//! primitive root `g`: `χ_j(g^a) = e^{2πi·j·a/(q-1)}` and `χ_j(n) = 0` when
//! `q | n`. Index 0 is the principal character; every other index is
//! primitive because `q` is prime.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::arith::{is_prime, multiplicative_order, primitive_root};
use crate::dft::{Dft, Direction};
use crate::error::{Error, Result};

/// Default table cap: the discrete-log table costs O(q) memory.
pub const DEFAULT_Q_MAX: u64 = 2_000_000;

/// A prime modulus with its primitive root, discrete-log table and a planned
/// length-`(q-1)` transform. Immutable once built and safe to share.
#[derive(Debug, Clone)]
pub struct PrimeModulus {
    q: u64,
    g: u64,
    /// `dlog[n]` for `1 <= n < q`; entry 0 is unused.
    dlog: Vec<u32>,
    /// `roots[a] = e^{2πi a/(q-1)}`
    roots: Vec<Complex64>,
    dft: Dft,
}

impl PrimeModulus {
    pub fn new(q: u64) -> Result<Self> {
        Self::with_cap(q, DEFAULT_Q_MAX)
    }

    pub fn with_cap(q: u64, cap: u64) -> Result<Self> {
        Self::validate(q, cap)?;
        let g = primitive_root(q)?;
        Ok(Self::build(q, g))
    }

    /// Builds the tables relative to a caller-chosen primitive root `g`.
    pub fn with_root(q: u64, g: u64) -> Result<Self> {
        Self::validate(q, DEFAULT_Q_MAX)?;
        let g = g % q;
        if g == 0 || multiplicative_order(g, q) != q - 1 {
            return Err(Error::InvalidParameter(alloc::format!(
                "{g} is not a primitive root mod {q}"
            )));
        }
        Ok(Self::build(q, g))
    }

    fn validate(q: u64, cap: u64) -> Result<()> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        if q < 5 {
            return Err(Error::ModulusTooSmall(q));
        }
        if q > cap || q > u32::MAX as u64 {
            return Err(Error::ModulusTooLarge { q, cap });
        }
        Ok(())
    }

    fn build(q: u64, g: u64) -> Self {
        let order = (q - 1) as usize;
        let mut dlog = vec![0u32; q as usize];
        let mut x = 1u64;
        for a in 0..order {
            dlog[x as usize] = a as u32;
            x = x * g % q;
        }
        let roots = (0..order)
            .map(|a| {
                let theta = 2.0 * PI * a as f64 / order as f64;
                Complex64::new(theta.cos(), theta.sin())
            })
            .collect();
        let dft = Dft::new(order, Direction::Inverse);
        Self { q, g, dlog, roots, dft }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn primitive_root(&self) -> u64 {
        self.g
    }

    /// φ(q) = q − 1, the size of the character group.
    pub fn phi(&self) -> u64 {
        self.q - 1
    }

    /// φ*(q) = q − 2, the number of primitive characters.
    pub fn phi_star(&self) -> u64 {
        self.q - 2
    }

    /// Discrete logarithm of `n` to base `g`, or `None` when `q | n`.
    pub fn dlog(&self, n: u64) -> Option<u32> {
        let r = n % self.q;
        (r != 0).then(|| self.dlog[r as usize])
    }

    /// `g^a mod q`.
    pub fn pow_root(&self, a: u64) -> u64 {
        crate::arith::pow_mod(self.g, a, self.q)
    }

    /// `e^{2πi a/(q-1)}` for `a` reduced mod `q - 1`.
    #[inline]
    pub fn unit_root(&self, a: u64) -> Complex64 {
        self.roots[(a % self.phi()) as usize]
    }

    /// χ_j(n).
    pub fn char_value(&self, j: CharacterIndex, n: u64) -> Complex64 {
        match self.dlog(n) {
            None => Complex64::new(0.0, 0.0),
            Some(a) => self.unit_root(j.0 * a as u64),
        }
    }

    /// χ_j(n) for `n` beyond the `u64` range.
    pub fn char_value_wide(&self, j: CharacterIndex, n: u128) -> Complex64 {
        self.char_value(j, (n % self.q as u128) as u64)
    }

    /// `Σ_n c_n χ_j(n)` for every `j = 0..q-2` at once.
    ///
    /// Terms with `q | n` are dropped; the rest are folded by discrete log and
    /// pushed through one length-`(q-1)` transform.
    pub fn all_character_sums<I>(&self, coeffs: I) -> Vec<Complex64>
    where
        I: IntoIterator<Item = (u64, Complex64)>,
    {
        let mut by_residue = vec![Complex64::new(0.0, 0.0); self.q as usize];
        for (n, c) in coeffs {
            by_residue[(n % self.q) as usize] += c;
        }
        self.all_character_sums_by_residue(&by_residue)
    }

    /// Same as [`all_character_sums`](Self::all_character_sums) with the
    /// coefficients already summed per residue class (`coeffs[r]` for `r` in `[0, q)`).
    ///
    /// # Panics
    /// If `coeffs.len() != q`.
    pub fn all_character_sums_by_residue(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(coeffs.len() as u64, self.q, "one coefficient per residue class expected");
        let mut folded = vec![Complex64::new(0.0, 0.0); self.phi() as usize];
        for (r, c) in coeffs.iter().enumerate().skip(1) {
            folded[self.dlog[r] as usize] = *c;
        }
        self.dft.process(&mut folded);
        folded
    }

    /// Index of the character `χ_j` of `self` in the labelling of `other`
    /// (same `q`, possibly a different primitive root).
    pub fn relabel(&self, j: CharacterIndex, other: &PrimeModulus) -> CharacterIndex {
        debug_assert_eq!(self.q, other.q);
        let shift = self.dlog(other.g).expect("primitive root is a unit") as u64;
        CharacterIndex((j.0 * shift) % self.phi())
    }
}

/// Index `j` in `[0, q-2]` of the character χ_j.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CharacterIndex(u64);

impl CharacterIndex {
    pub const PRINCIPAL: CharacterIndex = CharacterIndex(0);

    pub fn new(j: u64, modulus: &PrimeModulus) -> Result<Self> {
        if j >= modulus.phi() {
            return Err(Error::InvalidParameter(alloc::format!(
                "character index {j} out of range [0, {}]",
                modulus.phi() - 1
            )));
        }
        Ok(Self(j))
    }

    /// Like [`new`](Self::new) but rejects the principal character.
    pub fn primitive(j: u64, modulus: &PrimeModulus) -> Result<Self> {
        let idx = Self::new(j, modulus)?;
        if idx.is_principal() {
            return Err(Error::PrincipalCharacter);
        }
        Ok(idx)
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn is_principal(self) -> bool {
        self.0 == 0
    }

    /// Index of the conjugate character.
    pub fn conj(self, modulus: &PrimeModulus) -> Self {
        Self((modulus.phi() - self.0) % modulus.phi())
    }

    /// χ(−1) = 1.
    pub fn is_even(self) -> bool {
        self.0 % 2 == 0
    }
}
