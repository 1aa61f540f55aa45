//! Compensated (Neumaier) accumulators.
//!
//! Every long sum in the crate runs through these so that results do not
//! depend on accumulation error growth and reruns are bit-identical.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub const fn new() -> Self {
        Self { sum: 0.0, comp: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: KahanSum,
    im: KahanSum,
}

impl ComplexSum {
    pub const fn new() -> Self {
        Self { re: KahanSum::new(), im: KahanSum::new() }
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

pub fn sum_f64<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut acc = KahanSum::new();
    for x in it {
        acc.add(x);
    }
    acc.value()
}

pub fn sum_complex<I: IntoIterator<Item = Complex64>>(it: I) -> Complex64 {
    let mut acc = ComplexSum::new();
    for z in it {
        acc.add(z);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_mass() {
        // naive summation loses the 1.0 entirely
        let xs = [1e16, 1.0, -1e16];
        assert_eq!(sum_f64(xs), 1.0);
    }

    #[test]
    fn complex_parts_are_independent() {
        let z = sum_complex([Complex64::new(1e16, 1.0), Complex64::new(1.0, -1e16), Complex64::new(-1e16, 1e16)]);
        assert_eq!(z, Complex64::new(1.0, 1.0));
    }
}
