//! The kernel as the basis sum `sum_j Phi_j(z) conj(Phi_j(w))` over orthonormal
//! eigenfunctions. It shares no code with the closed forms beyond the norms,
//! and serves as ground truth for them.
//!
//! The sum can cancel to `1e-9` of its absolute size, so when `2(B - m)` is an
//! integer, the Gamma pair in the norms is elementary in `R^{j+B}` and every
//! `j`-dependent factor is formed and summed in double-double arithmetic.
//! Other parameters use compensated `f64` summation.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{gamma_series_decay, pair_geometry, KernelEvaluation, KernelPath};
use crate::error::{Error, Result};
use crate::geometry::{xi_coordinate, AnnulusParams, AnnulusPoint};
use crate::special::dd::{Dd, DdComplex};
use crate::special::gamma::log_gamma_abs_sq;
use crate::special::CompensatedSum;
use crate::spectral::{basis_log_norm_sq, basis_radial, orthonormal_phi_raw, LevelIndex};

/// Partial sum with the moduli of its first and last terms.
struct Partial {
    value: Complex64,
    first: f64,
    last: f64,
}

fn plain_sum(
    m: LevelIndex,
    z: &AnnulusPoint,
    w: &AnnulusPoint,
    params: &AnnulusParams,
    lo: i64,
    hi: i64,
) -> Result<Partial> {
    let mut value = CompensatedSum::default();
    let (mut first, mut last) = (0.0, 0.0);
    for j in lo..=hi {
        let term = orthonormal_phi_raw(j, m, z, params)? * orthonormal_phi_raw(j, m, w, params)?.conj();
        if j == lo {
            first = term.norm();
        }
        last = term.norm();
        value.add(term);
    }
    Ok(Partial { value: value.value(), first, last })
}

fn dd_powi(x: DdComplex, n: i64) -> DdComplex {
    let base = if n < 0 { x.inv() } else { x };
    (0..n.unsigned_abs()).fold(DdComplex::new(Dd::new(1.0), Dd::new(0.0)), |acc, _| acc * base)
}

/// `Phi_j(z) conj(Phi_j(w)) = t^j |Gamma(c + i y_j)|^2 R_j(xi_z) R_j(xi_w) / C`, with
/// `|Gamma(n + iy)|^2 = (pi y / sinh(pi y)) prod_{k<n} (k^2 + y^2)` or
/// `|Gamma(n + 1/2 + iy)|^2 = (pi / cosh(pi y)) prod_{k<n} ((k+1/2)^2 + y^2)`
/// and `pi y_j = (j + B) ln R`.
fn elementary_sum(
    m: LevelIndex,
    z: &AnnulusPoint,
    w: &AnnulusPoint,
    params: &AnnulusParams,
    lo: i64,
    hi: i64,
) -> Result<Partial> {
    let b = params.b();
    let c = b - m.get() as f64;
    // ln ||phi_j||^2 = ln C + j ln R - ln |Gamma(c + i y_j)|^2
    let ln_c = basis_log_norm_sq(0, m, params)? + log_gamma_abs_sq(c, b * params.ln_r() / PI)?;
    let scale = (-ln_c).exp();
    let ln_r = Dd::new(params.r()).ln();
    let lpi = ln_r / Dd::PI;
    let (xi_z, xi_w) = (xi_coordinate(z, params), xi_coordinate(w, params));
    let t = DdComplex::mul_conj(z.z(), w.z()).scale(Dd::new(1.0) / params.r());
    let mut power = dd_powi(t, lo);
    let mut sum = DdComplex::default();
    let (mut first, mut last) = (0.0, 0.0);
    for j in lo..=hi {
        let e = j as f64 + b;
        let y2 = (lpi * e) * (lpi * e);
        let r_e = (ln_r * e).exp();
        let r_inv = Dd::new(1.0) / r_e;
        let pair = if c.fract() == 0.0 {
            let lead = if e == 0.0 { Dd::new(1.0) } else { ln_r * (2.0 * e) / (r_e - r_inv) };
            (1..c as usize).fold(lead, |acc, k| acc * (y2 + (k * k) as f64))
        } else {
            let lead = Dd::PI * 2.0 / (r_e + r_inv);
            (0..(c - 0.5) as usize).fold(lead, |acc, k| acc * (y2 + (k as f64 + 0.5).powi(2)))
        };
        let radial = basis_radial(j, m, xi_z, params)? * basis_radial(j, m, xi_w, params)?;
        let term = power.scale(pair * radial);
        let modulus = term.to_complex().norm() * scale;
        if j == lo {
            first = modulus;
        }
        last = modulus;
        sum = sum + term;
        power = power * t;
    }
    Ok(Partial { value: sum.to_complex() * scale, first, last })
}

/// Largest window accepted by [`kernel_basis_sum_auto`].
pub const MAX_ORACLE_WINDOW: i64 = 4096;

/// Partial sum over `|j + B| <= window`, with a geometric estimate of the
/// omitted terms from the last term at each end.
pub fn kernel_basis_sum_oracle(
    m: LevelIndex,
    z: &AnnulusPoint,
    w: &AnnulusPoint,
    params: &AnnulusParams,
    window: i64,
) -> Result<KernelEvaluation> {
    if window < 1 {
        return Err(Error::InvalidParameter(format!("oracle window must be positive, got {window}")));
    }
    let b = params.b();
    let lo = (-b - window as f64).ceil() as i64;
    let hi = (-b + window as f64).floor() as i64;
    let elementary = (2.0 * (b - m.get() as f64)).fract() == 0.0;
    let Partial { value, first, last } =
        if elementary { elementary_sum(m, z, w, params, lo, hi)? } else { plain_sum(m, z, w, params, lo, hi)? };
    let geom = pair_geometry(z, w, params);
    let (plus, minus) = gamma_series_decay(&geom, b - m.get() as f64, 2.0 * m.get() as f64);
    let tail_of = |t: f64, rho: f64| if rho < 1.0 { t * rho / (1.0 - rho) } else { f64::INFINITY };
    let rho_plus = plus.q * ((hi as f64 + b + 1.0) / (hi as f64 + b)).powf(plus.degree);
    let rho_minus = minus.q * ((-(lo as f64) - b + 1.0) / (-(lo as f64) - b)).powf(minus.degree);
    let tail_bound = tail_of(last, rho_plus) + tail_of(first, rho_minus);
    Ok(KernelEvaluation { value, path: KernelPath::BasisSum, terms_used: (hi - lo + 1) as usize, tail_bound })
}

/// Grows the window from 16 by doubling until the tail estimate drops below
/// `tolerance * |value|`.
pub fn kernel_basis_sum_auto(
    m: LevelIndex,
    z: &AnnulusPoint,
    w: &AnnulusPoint,
    params: &AnnulusParams,
    tolerance: f64,
) -> Result<KernelEvaluation> {
    let mut window = 16;
    loop {
        let eval = kernel_basis_sum_oracle(m, z, w, params, window)?;
        if eval.tail_bound <= tolerance * eval.value.norm() {
            return Ok(eval);
        }
        window *= 2;
        if window > MAX_ORACLE_WINDOW {
            return Err(Error::Convergence(format!(
                "basis sum tail {:.3e} above {tolerance:.1e} relative at window {}",
                eval.tail_bound,
                window / 2
            )));
        }
    }
}
