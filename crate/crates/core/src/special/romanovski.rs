//! Routh-Romanovski polynomials, their Student-type weight, and the
//! identities used to derive the basis norms.
//!
//! Convention: `R_k^{(a,b)}(x) = (-2i)^k k! P_k^{(b-1+ia/2, b-1-ia/2)}(ix)`,
//! which coincides with the Rodrigues form built on
//! `w^{(a,b)}(x) = exp(-a acot x) (1+x^2)^{b-1}`.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::AnnulusParams;
use crate::special::gamma::{factorial, log_gamma_abs_sq, log_gamma_real};
use crate::special::jacobi::{jacobi_poly_coefficients, jacobi_poly_scaled, JacobiParams};

/// Relative imaginary residue above which a Routh evaluation is rejected.
pub const ROUTH_RESIDUE_LIMIT: f64 = 1e-8;

/// A real Routh-Romanovski value with the discarded imaginary part, relative
/// to the absolute term scale of the Jacobi sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouthValue {
    pub value: f64,
    pub imag_residue: f64,
}

/// Inverse cotangent on the branch (0, pi).
pub fn acot(x: f64) -> f64 {
    0.5 * PI - x.atan()
}

fn routh_jacobi_params(m: usize, a: f64, b: f64) -> Result<JacobiParams> {
    JacobiParams::new(Complex64::new(b - 1.0, 0.5 * a), Complex64::new(b - 1.0, -0.5 * a), m)
}

fn routh_prefactor(m: usize) -> Complex64 {
    Complex64::new(0.0, -2.0).powu(m as u32) * factorial(m)
}

pub fn routh_romanovski(m: usize, a: f64, b: f64, x: f64) -> Result<RouthValue> {
    let params = routh_jacobi_params(m, a, b)?;
    let (p, abs) = jacobi_poly_scaled(&params, Complex64::new(0.0, x));
    let pref = routh_prefactor(m);
    let v = pref * p;
    let scale = pref.norm() * abs;
    let imag_residue = if scale > 0.0 { v.im.abs() / scale } else { 0.0 };
    if imag_residue > ROUTH_RESIDUE_LIMIT {
        return Err(Error::ImaginaryResidue { residue: imag_residue });
    }
    Ok(RouthValue { value: v.re, imag_residue })
}

/// Real monomial coefficients of `R_m^{(a,b)}`, lowest degree first.
pub fn routh_coefficients(m: usize, a: f64, b: f64) -> Result<Vec<f64>> {
    let params = routh_jacobi_params(m, a, b)?;
    let poly = jacobi_poly_coefficients(&params, Complex64::i()).scale(routh_prefactor(m));
    let scale = poly.0.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let worst = poly.0.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    if scale > 0.0 && worst / scale > ROUTH_RESIDUE_LIMIT {
        return Err(Error::ImaginaryResidue { residue: worst / scale });
    }
    Ok(poly.0.iter().map(|c| c.re).collect())
}

/// Independent Rodrigues-formula evaluation of `R_m^{(a,b)}(x)` for `m <= 4`.
///
/// With `g = w (1+x^2)^m = exp(h)`, `h = -a acot x + (b-1+m) ln(1+x^2)`, the
/// polynomial is `g^{(m)}/g * (1+x^2)^m`. Each `h^{(n)} = N_n / (1+x^2)^n`
/// with `N_1 = a + 2cx` and `N_{n+1} = N_n' (1+x^2) - 2n x N_n`; the complete
/// Bell recurrence `P_{n+1} = sum_k C(n,k) P_{n-k} N_{k+1}` then gives
/// `g^{(n)}/g * (1+x^2)^n = P_n` exactly.
pub fn routh_rodrigues_oracle(m: usize, a: f64, b: f64, x: f64) -> Result<f64> {
    if m > 4 {
        return Err(Error::InvalidParameter(format!("Rodrigues oracle supports m <= 4, got {m}")));
    }
    let c = b - 1.0 + m as f64;
    let mut numerators: Vec<Vec<f64>> = vec![vec![a, 2.0 * c]];
    for n in 1..m {
        let prev = &numerators[n - 1];
        // N' (1 + x^2) - 2n x N
        let mut next = vec![0.0; prev.len() + 1];
        for (k, &coef) in prev.iter().enumerate().skip(1) {
            next[k - 1] += k as f64 * coef;
            next[k + 1] += k as f64 * coef;
        }
        for (k, &coef) in prev.iter().enumerate() {
            next[k + 1] -= 2.0 * n as f64 * coef;
        }
        numerators.push(next);
    }
    let eval = |p: &[f64]| p.iter().rev().fold(0.0, |acc, &q| acc * x + q);
    let n_at: Vec<f64> = numerators.iter().map(|p| eval(p)).collect();
    let mut bell = vec![1.0];
    for n in 0..m {
        let mut binom = 1.0;
        let mut next = 0.0;
        for k in 0..=n {
            next += binom * bell[n - k] * n_at[k];
            binom = binom * (n - k) as f64 / (k + 1) as f64;
        }
        bell.push(next);
    }
    Ok(bell[m])
}

/// Leading coefficient of `R_m^{(a, 1-B)}`: `(-1)^m Gamma(2B-m) / Gamma(2B-2m)`,
/// independent of `a`.
pub fn routh_leading_coefficient(m: usize, b: f64) -> Result<f64> {
    let (num, s_num) = log_gamma_real(2.0 * b - m as f64)?;
    let (den, s_den) = log_gamma_real(2.0 * b - 2.0 * m as f64)?;
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * s_num * s_den * (num - den).exp())
}

/// Student-type weight `(1+xi^2)^{-B} exp(alpha(j,B) acot xi)` of the finite
/// orthogonality of `R_m^{(-alpha(j,B), 1-B)}`.
///
/// With `xi = cot theta` this is `e^{alpha theta} sin^{2B} theta`, so that
/// `weight * dxi = e^{alpha theta} sin^{2B-2} theta dtheta`, the radial part
/// of the annulus measure.
pub fn student_weight(xi: f64, j: i64, params: &AnnulusParams) -> f64 {
    let alpha = params.alpha(j);
    (alpha * acot(xi) - params.b() * (1.0 + xi * xi).ln()).exp()
}

/// `int_0^pi e^{-p x} sin(x)^nu dx = 2^{-nu} pi e^{-pi p/2} Gamma(nu+1) / |Gamma(1 + nu/2 + i p/2)|^2`.
pub fn cauchy_beta_integral(p: f64, nu: f64) -> Result<f64> {
    if !(nu > -1.0) {
        return Err(Error::InvalidParameter(format!("Cauchy Beta integral needs nu > -1, got {nu}")));
    }
    let (lg, _) = log_gamma_real(nu + 1.0)?;
    let denom = log_gamma_abs_sq(1.0 + 0.5 * nu, 0.5 * p)?;
    Ok((-nu * LN_2 + PI.ln() - 0.5 * PI * p + lg - denom).exp())
}
