//! `sigma_{k,l}` for integer `B` as a finite combination of logarithmic
//! derivatives of `theta4` with nome `1/R`.
//!
//! With `p = max(k, l)`, `L = ln R/pi` and `n = j + B`,
//! `Gamma(B-k+inL) Gamma(B-l-inL) = Gamma(B-p)^2 (2 ln R) n R^n/(R^{2n}-1) Pi(n) Q(n)`
//! where `Q(n) = (B-p+inL)_{p-k} (B-p-inL)_{p-l}` and
//! `Pi(n) = prod_{q=1}^{B-p-1} (1 + n^2 L^2/q^2)`. Writing
//! `Pi Q = sum_r c_r n^{2r} + sum_r d_r n^{2r+1}`, the symmetric sums over
//! `n >= 1` are derivatives of `log theta4` at `z0 = (i/2) log t`:
//! `sum n^{2r+1} R^n/(R^{2n}-1) cosh(n log t) = D_{2r+2} / (4 (-1)^r 2^{2r+1})`,
//! `sum n^{2r}   R^n/(R^{2n}-1) sinh(n log t) = D_{2r+1} / (4i (-1)^r 4^r)`.

use num_complex::Complex64;

use super::extended::{dd_t, linear_dd, poly_mul_dd, theta4_log_derivative_dd};
use super::{double_sum_coefficients, log_prefactor, pair_geometry, require_integer_b, KernelEvaluation, KernelPath};
use crate::error::{Error, Result};
use crate::geometry::{AnnulusParams, AnnulusPoint};
use crate::special::dd::{Dd, DdComplex};
use crate::special::gamma::gamma_real;
use crate::special::SeriesControl;
use crate::spectral::LevelIndex;

/// `Pi(n) Q(n)` as a polynomial in `n`, in double-double.
fn weight_polynomial(k: usize, l: usize, b: u32, lpi: Dd) -> Vec<DdComplex> {
    let p = k.max(l);
    let base = f64::from(b) - p as f64;
    let mut q = vec![DdComplex::one()];
    for r in 0..(p - k) {
        q = poly_mul_dd(&q, &linear_dd(base + r as f64, lpi));
    }
    for r in 0..(p - l) {
        q = poly_mul_dd(&q, &linear_dd(base + r as f64, -lpi));
    }
    for qq in 1..(b as usize - p) {
        let s = lpi / qq as f64;
        let quad = [DdComplex::one(), DdComplex::zero(), DdComplex::new(s * s, Dd::new(0.0))];
        q = poly_mul_dd(&q, &quad);
    }
    q
}

pub fn sigma_theta_path(
    k: usize,
    l: usize,
    z: &AnnulusPoint,
    w: &AnnulusPoint,
    params: &AnnulusParams,
    ctrl: &SeriesControl,
) -> Result<Complex64> {
    let b = require_integer_b(params, "the theta path")?;
    let p = k.max(l);
    if p as u32 >= b {
        return Err(Error::InvalidParameter(format!("B - max(k, l) must be at least 1 (B = {b}, k = {k}, l = {l})")));
    }
    let geom = pair_geometry(z, w, params);
    let ln_r = Dd::new(params.r()).ln();
    let lpi = ln_r / Dd::PI;
    let t = dd_t(z, w, params);
    let poly = weight_polynomial(k, l, b, lpi);
    let mut lambert = DdComplex::zero();
    for (deg, &coef) in poly.iter().enumerate() {
        if coef.norm() == 0.0 {
            continue;
        }
        let half = deg / 2;
        let sum = if deg % 2 == 0 {
            // n^{2r}: paired with the cosh sum of n^{2r+1}.
            let sign = if half % 2 == 0 { 1.0 } else { -1.0 };
            let d = theta4_log_derivative_dd(deg + 2, t, ln_r, ctrl)?;
            d.scale_f64(1.0 / (4.0 * sign * 2f64.powi(deg as i32 + 1)))
        } else {
            // n^{2r+1}: paired with the sinh sum of n^{2r+2}; dividing by i is a rotation by -i.
            let s = half + 1;
            let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
            let d = theta4_log_derivative_dd(2 * s + 1, t, ln_r, ctrl)?;
            d.rotate(3).scale_f64(1.0 / (4.0 * sign * 4f64.powi(s as i32)))
        };
        lambert = lambert + coef * sum;
    }
    let g = gamma_real(f64::from(b) - p as f64)?;
    let bracket = poly[0] + lambert.scale(ln_r * 4.0);
    Ok(bracket.to_complex() * (g * g) * geom.t_pow(-f64::from(b)))
}

/// The level-`m` kernel with every `sigma_{k,l}` taken from [`sigma_theta_path`].
pub fn kernel_km_theta(
    m: LevelIndex,
    z: &AnnulusPoint,
    w: &AnnulusPoint,
    params: &AnnulusParams,
    ctrl: &SeriesControl,
) -> Result<KernelEvaluation> {
    require_integer_b(params, "the theta path")?;
    let m = m.get();
    let geom = pair_geometry(z, w, params);
    let coeffs = double_sum_coefficients(m, params.b());
    let mut value = Complex64::new(0.0, 0.0);
    for k in 0..=m {
        for l in 0..=(m - k) {
            let s = sigma_theta_path(k, l, z, w, params, ctrl)?;
            value += s * geom.v.conj().powu(k as u32) * geom.v.powu(l as u32) * coeffs[k][l];
        }
    }
    let value = value * log_prefactor(m, params)?.exp();
    let terms = (m + 1) * (m + 2) / 2;
    Ok(KernelEvaluation {
        value,
        path: KernelPath::Theta,
        terms_used: terms,
        tail_bound: ctrl.tolerance * value.norm(),
    })
}
