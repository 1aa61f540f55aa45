//! Discrete Fourier transforms of arbitrary length.
//!
//! The character group mod a prime `q` is cyclic of order `q - 1`, which is
//! rarely a power of two. Power-of-two lengths use an iterative radix-2
//! transform; short lengths are done directly; everything else goes through
//! Bluestein's chirp-z reduction to a power-of-two cyclic convolution.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

const DIRECT_MAX: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `X_j = Σ_k x_k e^{-2πi jk/n}`
    Forward,
    /// `X_j = Σ_k x_k e^{+2πi jk/n}` (unnormalised)
    Inverse,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => -1.0,
            Direction::Inverse => 1.0,
        }
    }
}

/// `e^{sign·2πi·k/n}` with `k` reduced first so the angle stays small.
fn root_of_unity(k: usize, n: usize, sign: f64) -> Complex64 {
    let k = k % n;
    let theta = 2.0 * PI * (k as f64) / (n as f64);
    Complex64::new(theta.cos(), sign * theta.sin())
}

#[derive(Debug, Clone)]
struct Radix2 {
    n: usize,
    twiddles: Vec<Complex64>,
}

impl Radix2 {
    fn new(n: usize, sign: f64) -> Self {
        debug_assert!(n.is_power_of_two());
        let twiddles = (0..n / 2).map(|k| root_of_unity(k, n, sign)).collect();
        Self { n, twiddles }
    }

    fn process(&self, data: &mut [Complex64]) {
        let n = self.n;
        if n <= 1 {
            return;
        }
        let bits = n.trailing_zeros();
        for i in 0..n {
            let r = i.reverse_bits() >> (usize::BITS - bits);
            if i < r {
                data.swap(i, r);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for chunk in data.chunks_exact_mut(len) {
                let (lo, hi) = chunk.split_at_mut(half);
                for (k, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                    let t = *b * self.twiddles[k * stride];
                    *b = *a - t;
                    *a += t;
                }
            }
            len <<= 1;
        }
    }
}

#[derive(Debug, Clone)]
struct Bluestein {
    n: usize,
    chirp: Vec<Complex64>,
    kernel_spectrum: Vec<Complex64>,
    forward: Radix2,
    inverse: Radix2,
}

impl Bluestein {
    fn new(n: usize, sign: f64) -> Self {
        let m = (2 * n - 1).next_power_of_two();
        // c_k = e^{sign·πi k²/n}; k² is reduced mod 2n to keep the angle exact
        let chirp: Vec<Complex64> = (0..n)
            .map(|k| {
                let k2 = ((k as u128 * k as u128) % (2 * n as u128)) as usize;
                root_of_unity(k2, 2 * n, sign)
            })
            .collect();
        let mut kernel = vec![Complex64::new(0.0, 0.0); m];
        kernel[0] = chirp[0].conj();
        for k in 1..n {
            kernel[k] = chirp[k].conj();
            kernel[m - k] = chirp[k].conj();
        }
        let forward = Radix2::new(m, -1.0);
        let inverse = Radix2::new(m, 1.0);
        forward.process(&mut kernel);
        Self { n, chirp, kernel_spectrum: kernel, forward, inverse }
    }

    fn process(&self, data: &mut [Complex64]) {
        let m = self.kernel_spectrum.len();
        let mut work = vec![Complex64::new(0.0, 0.0); m];
        for (w, (x, c)) in work.iter_mut().zip(data.iter().zip(&self.chirp)) {
            *w = x * c;
        }
        self.forward.process(&mut work);
        for (w, k) in work.iter_mut().zip(&self.kernel_spectrum) {
            *w *= k;
        }
        self.inverse.process(&mut work);
        let scale = 1.0 / m as f64;
        for (j, out) in data.iter_mut().enumerate().take(self.n) {
            *out = work[j] * self.chirp[j] * scale;
        }
    }
}

#[derive(Debug, Clone)]
enum Kernel {
    Direct(Vec<Complex64>),
    Radix2(Radix2),
    Bluestein(Bluestein),
}

/// A planned transform of fixed length and direction. Immutable once built.
#[derive(Debug, Clone)]
pub struct Dft {
    len: usize,
    kernel: Kernel,
}

impl Dft {
    pub fn new(len: usize, direction: Direction) -> Self {
        let sign = direction.sign();
        let kernel = if len.is_power_of_two() {
            Kernel::Radix2(Radix2::new(len, sign))
        } else if len <= DIRECT_MAX {
            Kernel::Direct((0..len).map(|k| root_of_unity(k, len, sign)).collect())
        } else {
            Kernel::Bluestein(Bluestein::new(len, sign))
        };
        Self { len, kernel }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Transforms `data` in place.
    ///
    /// # Panics
    /// If `data.len()` differs from the planned length.
    pub fn process(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.len, "buffer length does not match the plan");
        match &self.kernel {
            Kernel::Radix2(r) => r.process(data),
            Kernel::Bluestein(b) => b.process(data),
            Kernel::Direct(roots) => {
                let n = self.len;
                let out: Vec<Complex64> = (0..n)
                    .map(|j| {
                        data.iter()
                            .enumerate()
                            .fold(Complex64::new(0.0, 0.0), |acc, (k, x)| acc + x * roots[(j * k) % n])
                    })
                    .collect();
                data.copy_from_slice(&out);
            }
        }
    }
}
