//! Jacobi polynomials with complex parameters, by the finite binomial sum.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::gamma::pochhammer;
use crate::special::poly::Poly;

pub const MAX_DEGREE: usize = 64;

/// Parameters (alpha, beta) and degree of `P_n^{(alpha, beta)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub degree: usize,
}

impl JacobiParams {
    pub fn new(alpha: Complex64, beta: Complex64, degree: usize) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::InvalidParameter(format!("Jacobi degree {degree} exceeds {MAX_DEGREE}")));
        }
        Ok(Self { alpha, beta, degree })
    }

    pub fn real(alpha: f64, beta: f64, degree: usize) -> Result<Self> {
        Self::new(Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0), degree)
    }

    /// Coefficient of `((x-1)/2)^l ((x+1)/2)^{n-l}`:
    /// binom(n + alpha, n - l) * binom(n + beta, l).
    fn term_coefficient(&self, l: usize) -> Complex64 {
        let n = self.degree;
        let first = pochhammer(self.alpha + (l + 1) as f64, n - l) / factorial(n - l);
        let second = pochhammer(self.beta + (n - l + 1) as f64, l) / factorial(l);
        first * second
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `P_n^{(alpha, beta)}(x)` together with the sum of the absolute values of the
/// terms, which is the natural scale for rounding error in the sum.
pub fn jacobi_poly_scaled(params: &JacobiParams, x: Complex64) -> (Complex64, f64) {
    let n = params.degree;
    let lo = (x - 1.0) * 0.5;
    let hi = (x + 1.0) * 0.5;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    for l in 0..=n {
        let term = params.term_coefficient(l) * lo.powu(l as u32) * hi.powu((n - l) as u32);
        sum += term;
        abs += term.norm();
    }
    (sum, abs)
}

pub fn jacobi_poly(params: &JacobiParams, x: Complex64) -> Complex64 {
    jacobi_poly_scaled(params, x).0
}

/// Monomial coefficients of `x -> P_n^{(alpha, beta)}(s x)` for a complex scale `s`.
pub fn jacobi_poly_coefficients(params: &JacobiParams, s: Complex64) -> Poly {
    let n = params.degree;
    let half = Complex64::new(0.5, 0.0);
    let lo = Poly::linear(-half, s * 0.5);
    let hi = Poly::linear(half, s * 0.5);
    let mut out = Poly(vec![Complex64::new(0.0, 0.0); n + 1]);
    for l in 0..=n {
        let term = (&lo.pow(l) * &hi.pow(n - l)).scale(params.term_coefficient(l));
        out = &out + &term;
    }
    out
}
