//! Helpers for arbitrary-precision arithmetic built on `rug::Float`.

use rug::ops::CompleteRound;
use rug::Float;

/// Default mantissa size in bits for high-precision computations.
pub const DEFAULT_PREC: u32 = 256;

/// Creates a `Float` with the given precision from an `f64`.
pub fn hp(prec: u32, x: f64) -> Float {
    Float::with_val(prec, x)
}

/// Creates a `Float` with the given precision from an integer.
pub fn hp_u(prec: u32, n: u64) -> Float {
    Float::with_val(prec, n)
}

/// Sums a slice of `Float`s by pairwise (tree) reduction to bound cancellation.
pub fn tree_sum(prec: u32, xs: &[Float]) -> Float {
    match xs.len() {
        0 => Float::with_val(prec, 0),
        1 => xs[0].clone(),
        n => {
            let mid = n / 2;
            tree_sum(prec, &xs[..mid]) + tree_sum(prec, &xs[mid..])
        }
    }
}

/// Pairwise-summed inner product `sum_i a_i * b_i * w_i`.
pub fn tree_dot3(prec: u32, a: &[Float], b: &[Float], w: &[Float]) -> Float {
    debug_assert_eq!(a.len(), b.len());
    debug_assert_eq!(a.len(), w.len());
    let terms: Vec<Float> = (0..a.len())
        .map(|i| (&a[i] * &b[i]).complete(prec) * &w[i])
        .collect();
    tree_sum(prec, &terms)
}

/// Complex number with `rug::Float` components.
///
/// The MPC-backed `rug::Complex` is unavailable without system libmpc, and only
/// ring operations plus modulus are needed for polynomial recurrences, so this
/// minimal type suffices.
#[derive(Clone, Debug)]
pub struct HpComplex {
    pub re: Float,
    pub im: Float,
}

impl HpComplex {
    pub fn new(re: Float, im: Float) -> Self {
        Self { re, im }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Self::new(hp(prec, re), hp(prec, im))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_f64(prec, 0.0, 0.0)
    }

    pub fn one(prec: u32) -> Self {
        Self::from_f64(prec, 1.0, 0.0)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::new(
            (&self.re + &rhs.re).complete(self.prec()),
            (&self.im + &rhs.im).complete(self.prec()),
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::new(
            (&self.re - &rhs.re).complete(self.prec()),
            (&self.im - &rhs.im).complete(self.prec()),
        )
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let p = self.prec();
        let re = (&self.re * &rhs.re).complete(p) - (&self.im * &rhs.im).complete(p);
        let im = (&self.re * &rhs.im).complete(p) + (&self.im * &rhs.re).complete(p);
        Self::new(re, im)
    }

    pub fn scale(&self, s: &Float) -> Self {
        Self::new(
            (&self.re * s).complete(self.prec()),
            (&self.im * s).complete(self.prec()),
        )
    }

    pub fn abs(&self) -> Float {
        let p = self.prec();
        let m = (&self.re * &self.re).complete(p) + (&self.im * &self.im).complete(p);
        m.sqrt()
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_sum_matches_sequential() {
        let prec = 128;
        let xs: Vec<Float> = (1..=100).map(|i| hp(prec, i as f64)).collect();
        let s = tree_sum(prec, &xs);
        assert_eq!(s.to_f64(), 5050.0);
    }

    #[test]
    fn complex_mul() {
        let a = HpComplex::from_f64(128, 1.0, 2.0);
        let b = HpComplex::from_f64(128, 3.0, -1.0);
        let c = a.mul(&b);
        assert_eq!(c.re.to_f64(), 5.0);
        assert_eq!(c.im.to_f64(), 5.0);
    }
}
