//! Dense complex polynomials in monomial form, lowest degree first.

use std::ops::{Add, Mul};

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<Complex64>);

impl Poly {
    pub fn constant(c: Complex64) -> Self {
        Poly(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    /// `c0 + c1 x`.
    pub fn linear(c0: Complex64, c1: Complex64) -> Self {
        Poly(vec![c0, c1])
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.0.get(k).copied().unwrap_or_default()
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.0.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        if self.0.len() <= 1 {
            return Poly(vec![Complex64::new(0.0, 0.0)]);
        }
        Poly(self.0.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect())
    }

    pub fn scale(mut self, s: Complex64) -> Self {
        self.0.iter_mut().for_each(|c| *c *= s);
        self
    }

    pub fn pow(&self, n: usize) -> Self {
        (0..n).fold(Poly::one(), |acc, _| &acc * self)
    }

    /// Splits into the parts carrying even and odd powers.
    pub fn even_odd(&self) -> (Self, Self) {
        let zero = Complex64::new(0.0, 0.0);
        let even = self.0.iter().enumerate().map(|(k, &c)| if k % 2 == 0 { c } else { zero });
        let odd = self.0.iter().enumerate().map(|(k, &c)| if k % 2 == 1 { c } else { zero });
        (Poly(even.collect()), Poly(odd.collect()))
    }
}

impl Mul for &Poly {
    type Output = Poly;

    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = vec![Complex64::new(0.0, 0.0); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }
}

impl Add for &Poly {
    type Output = Poly;

    fn add(self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        Poly((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let c = |re: f64| Complex64::new(re, 0.0);
        let p = Poly::linear(c(1.0), c(2.0));
        let sq = p.pow(2);
        assert_eq!(sq.0, vec![c(1.0), c(4.0), c(4.0)]);
        assert_eq!(sq.derivative().0, vec![c(4.0), c(8.0)]);
        assert_eq!(sq.eval(c(3.0)), c(49.0));
        let (e, o) = sq.even_odd();
        assert_eq!((&e + &o).0, sq.0);
        assert_eq!(o.eval(c(-1.0)), -o.eval(c(1.0)));
    }
}
