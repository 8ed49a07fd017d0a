//! Complex-argument special functions: log-Gamma and Gamma pairs, Jacobi and
//! Routh-Romanovski polynomials, and the fourth theta function.

pub(crate) mod dd;
pub mod gamma;
pub mod jacobi;
pub mod poly;
pub mod romanovski;
pub mod theta;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use gamma::{gamma_abs_sq, gamma_pair_product_integer, lambert_weight, log_gamma, log_gamma_abs_sq, pochhammer};
pub use jacobi::{jacobi_poly, JacobiParams};
pub use romanovski::{
    acot, cauchy_beta_integral, routh_coefficients, routh_leading_coefficient, routh_rodrigues_oracle,
    routh_romanovski, student_weight, RouthValue,
};
pub use theta::{theta4, theta4_log_derivative};

/// Truncation policy shared by every infinite series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    /// Relative tolerance on the truncation tail.
    pub tolerance: f64,
    /// Hard cap on the number of terms per direction.
    pub max_terms: usize,
    /// Minimum gap between a decay ratio and 1.
    pub boundary_margin: f64,
}

impl SeriesControl {
    pub fn new(tolerance: f64, max_terms: usize, boundary_margin: f64) -> Result<Self> {
        if !(tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tolerance}")));
        }
        if max_terms < 16 {
            return Err(Error::InvalidParameter(format!("max_terms must be at least 16, got {max_terms}")));
        }
        if !(boundary_margin > 0.0 && boundary_margin < 1.0) {
            return Err(Error::InvalidParameter(format!("boundary margin must lie in (0,1), got {boundary_margin}")));
        }
        Ok(Self { tolerance, max_terms, boundary_margin })
    }

    pub fn with_tolerance(self, tolerance: f64) -> Result<Self> {
        Self::new(tolerance, self.max_terms, self.boundary_margin)
    }
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self { tolerance: 1e-15, max_terms: 4096, boundary_margin: 1e-3 }
    }
}

/// A truncated series with its bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: Complex64,
    pub terms: usize,
    pub tail_bound: f64,
}

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: Complex64,
    carry: Complex64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: Complex64) {
        let (re, cre) = two_sum(self.sum.re, x.re);
        let (im, cim) = two_sum(self.sum.im, x.im);
        self.sum = Complex64::new(re, im);
        self.carry += Complex64::new(cre, cim);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.carry
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = if a.abs() >= b.abs() { (a - s) + b } else { (b - s) + a };
    (s, err)
}

/// Stopping rule: the tail is below `tol` relative to the partial sum, or
/// below rounding level relative to the absolute sum (exact cancellation).
pub(crate) fn converged(tail: f64, partial: f64, abs_sum: f64, tol: f64) -> bool {
    tail <= tol * partial || tail <= 1e-18 * abs_sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn control_validation() {
        assert!(SeriesControl::new(0.0, 100, 0.1).is_err());
        assert!(SeriesControl::new(1e-12, 8, 0.1).is_err());
        assert!(SeriesControl::new(1e-12, 100, 1.0).is_err());
        assert!(SeriesControl::new(1e-12, 16, 0.5).is_ok());
    }
}
