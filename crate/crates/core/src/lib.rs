//! Moments of Dirichlet L-functions to a fixed prime modulus on the critical line.
//!
//! The crate is `no_std` (it needs `alloc`). It is organised bottom-up:
//!
//! - [`arith`] and [`character`]: primes, primitive roots, discrete-log tables,
//!   character values and all-character sums through a cyclic DFT ([`dft`]).
//! - [`special`]: complex Γ, digamma, Hurwitz and Riemann zeta.
//! - [`lfunction`]: `L(1/2 + it, χ)` by truncated Dirichlet sums and by an exact
//!   Hurwitz decomposition.
//! - [`mollifier`]: the ℓ-sequence, prime windows, truncated exponentials and
//!   sparse Dirichlet-polynomial expansions.
//! - [`lab`]: moments, the Hölder-type inequality checks, the twisted second
//!   moment comparison and the mollified mean values.
//!
//! Characters mod `q` are addressed by an index `j` in `[0, q-2]` through
//! `χ_j(g^a) = e^{2πi·j·a/(q-1)}` where `g` is the smallest primitive root.
#![no_std]
// without std the f64 math methods come from num_traits::Float, which is
// shadowed (and reported unused) whenever std is linked in

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod arith;
pub mod character;
pub mod dft;
mod error;
pub mod lab;
pub mod lfunction;
pub mod mollifier;
pub mod special;
pub mod sum;

pub use character::{CharacterIndex, PrimeModulus};
pub use error::{Error, Result};
pub use lfunction::{CriticalPoint, LVector, Method};
pub use mollifier::{DirichletPolynomial, MollifierParams, WindowMode};
pub use num_complex::Complex64;
