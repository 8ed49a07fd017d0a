//! Double-double arithmetic (about 32 significant digits) for reference sums
//! whose terms cancel far below their own size.
//!
//! Only what the basis-sum oracle needs: the four operations, `sqrt`, `exp`,
//! `ln`, and complex products.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use super::two_sum;

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    pub const PI: Dd = Dd { hi: std::f64::consts::PI, lo: 1.2246467991473532e-16 };
    pub const LN_2: Dd = Dd { hi: std::f64::consts::LN_2, lo: 2.3190468138462996e-17 };

    pub fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Self { hi, lo }
    }

    /// Multiplication by a power of two, exact.
    fn ldexp(self, k: i32) -> Self {
        let s = 2f64.powi(k);
        Self { hi: self.hi * s, lo: self.lo * s }
    }

    pub fn exp(self) -> Self {
        // Each final squaring doubles the relative error; five keep it near 1e-31.
        const HALVINGS: i32 = 5;
        let k = (self.hi / Self::LN_2.hi).round();
        let r = (self - Self::LN_2 * k).ldexp(-HALVINGS);
        // Taylor series on |r| < 0.011; 16 terms reach far below the unit roundoff.
        let mut term = Self::new(1.0);
        let mut sum = Self::new(1.0);
        for n in 1..=16 {
            term = term * r / n as f64;
            sum = sum + term;
        }
        for _ in 0..HALVINGS {
            sum = sum * sum;
        }
        sum.ldexp(k as i32)
    }

    /// Natural logarithm by one Newton step from the `f64` value.
    pub fn ln(self) -> Self {
        let y = Self::new(self.hi.ln());
        y + (self * (-y).exp() - 1.0)
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Self::new(x)
    }
}

impl Add for Dd {
    type Output = Dd;

    fn add(self, rhs: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Dd::renorm(s, e + f)
    }
}

impl Add<f64> for Dd {
    type Output = Dd;

    fn add(self, rhs: f64) -> Dd {
        let (s, e) = two_sum(self.hi, rhs);
        Dd::renorm(s, e + self.lo)
    }
}

impl Sub<f64> for Dd {
    type Output = Dd;

    fn sub(self, rhs: f64) -> Dd {
        self + (-rhs)
    }
}

impl Neg for Dd {
    type Output = Dd;

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;

    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Mul for Dd {
    type Output = Dd;

    fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        Dd::renorm(p, e + (self.hi * rhs.lo + self.lo * rhs.hi))
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;

    fn mul(self, rhs: f64) -> Dd {
        let (p, e) = two_prod(self.hi, rhs);
        Dd::renorm(p, e + self.lo * rhs)
    }
}

impl Div for Dd {
    type Output = Dd;

    fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * q1;
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * q2;
        let q3 = r.hi / rhs.hi;
        Dd::renorm(q1, q2) + q3
    }
}

impl Div<f64> for Dd {
    type Output = Dd;

    fn div(self, rhs: f64) -> Dd {
        self / Dd::new(rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub fn new(re: Dd, im: Dd) -> Self {
        Self { re, im }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// `a conj(b)` for `f64` inputs, with exact products.
    pub fn mul_conj(a: Complex64, b: Complex64) -> Self {
        let re = Dd::from(two_prod(a.re, b.re)) + Dd::from(two_prod(a.im, b.im));
        let im = Dd::from(two_prod(a.im, b.re)) - Dd::from(two_prod(a.re, b.im));
        Self { re, im }
    }

    pub fn scale(self, s: Dd) -> Self {
        Self { re: self.re * s, im: self.im * s }
    }

    pub fn inv(self) -> Self {
        let den = self.re * self.re + self.im * self.im;
        Self { re: self.re / den, im: -self.im / den }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from(Complex64::new(1.0, 0.0))
    }

    pub fn scale_f64(self, s: f64) -> Self {
        Self { re: self.re * s, im: self.im * s }
    }

    /// `i^k self`.
    pub fn rotate(self, k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => self,
            1 => Self { re: -self.im, im: self.re },
            2 => Self { re: -self.re, im: -self.im },
            _ => Self { re: self.im, im: -self.re },
        }
    }

    pub fn norm(self) -> f64 {
        self.to_complex().norm()
    }
}

impl From<Complex64> for DdComplex {
    fn from(z: Complex64) -> Self {
        Self { re: Dd::new(z.re), im: Dd::new(z.im) }
    }
}

impl std::ops::Sub for DdComplex {
    type Output = DdComplex;

    fn sub(self, rhs: DdComplex) -> DdComplex {
        DdComplex { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl From<(f64, f64)> for Dd {
    fn from((hi, lo): (f64, f64)) -> Self {
        Dd::renorm(hi, lo)
    }
}

impl Add for DdComplex {
    type Output = DdComplex;

    fn add(self, rhs: DdComplex) -> DdComplex {
        DdComplex { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Mul for DdComplex {
    type Output = DdComplex;

    fn mul(self, rhs: DdComplex) -> DdComplex {
        DdComplex { re: self.re * rhs.re - self.im * rhs.im, im: self.re * rhs.im + self.im * rhs.re }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(x: Dd, hi: f64, lo: f64, tol: f64) -> bool {
        ((x.hi - hi) + (x.lo - lo)).abs() <= tol * hi.abs()
    }

    #[test]
    fn constants_and_functions() {
        let e = Dd::new(1.0).exp();
        assert!(close(e, std::f64::consts::E, 1.4456468917292502e-16, 1e-30), "{e:?}");
        assert!(close(Dd::new(4.0).ln(), 1.3862943611198906, 4.638093627692599e-17, 1e-30));
        assert!(close(Dd::new(6.0).ln(), 1.791759469228055, 4.349979825096335e-17, 1e-30));
        assert!(close(Dd::new(-7.3).exp(), 0.0006755387751938444, -2.9077504938462766e-20, 3e-30));
        assert!(close(Dd::new(2.0).ln(), Dd::LN_2.hi, Dd::LN_2.lo, 1e-30));
    }

    #[test]
    fn arithmetic_keeps_low_word() {
        let third = Dd::new(1.0) / 3.0;
        let back = third * 3.0 - 1.0;
        assert!(back.to_f64().abs() < 1e-31);
        let z = DdComplex::mul_conj(Complex64::new(0.1, 0.7), Complex64::new(-1.3, 0.4));
        let one = z * z.inv();
        assert!((one.re.to_f64() - 1.0).abs() < 1e-30 && one.im.to_f64().abs() < 1e-30);
    }
}
