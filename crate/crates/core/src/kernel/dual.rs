//! Poisson resummation of the Gamma-weighted series
//! `sum_j |Gamma(c + i y_j)|^2 S(y_j) t^j`, `y_j = (j + B) L`, `L = ln R / pi`.
//!
//! With `tau = ln t` the series equals
//! `(1/L) e^{-B tau} sum_k e^{2 pi i k B} S(d/ds) Phi_c(s_k)`, `s_k = (tau - 2 pi i k) / L`,
//! where `Phi_c(s) = int |Gamma(c + i y)|^2 e^{s y} dy = 2 pi Gamma(2c) (2 cos(s/2))^{-2c}`
//! for `c > 0` and `|Re s| < pi`. Successive terms shrink by `e^{-2 pi^2 c / ln R}`.
//!
//! The direct series can cancel to a small fraction of its absolute sum
//! (ratios beyond `10^7` occur for interior pairs); the resummed one has a
//! dominant leading term, so its rounding error stays at a few ulps of the value.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::series::{check_decay, sum_bilateral, Decay};
use super::PairGeometry;
use crate::error::Result;
use crate::special::gamma::{factorial, log_gamma_real};
use crate::special::poly::Poly;
use crate::special::{SeriesControl, SeriesSum};

/// Largest per-term ratio for which the resummed series is preferred.
pub(crate) const RESUMMATION_MAX_RATIO: f64 = 0.5;

pub(crate) fn resummation_ratio(c: f64, ln_r: f64) -> f64 {
    (-2.0 * PI * PI * c / ln_r).exp()
}

pub(crate) fn resummation_applies(c: f64, ln_r: f64) -> bool {
    c > 0.0 && resummation_ratio(c, ln_r) <= RESUMMATION_MAX_RATIO
}

/// `ln(2 cos x)` on the principal branch, without overflow for large `|Im x|`.
fn ln_two_cos(x: Complex64) -> Complex64 {
    let i = Complex64::i();
    let raw =
        if x.im >= 0.0 { -i * x + (1.0 + (i * x * 2.0).exp()).ln() } else { i * x + (1.0 + (-i * x * 2.0).exp()).ln() };
    Complex64::new(raw.re, (raw.im + PI).rem_euclid(2.0 * PI) - PI)
}

fn tan_stable(x: Complex64) -> Complex64 {
    let i = Complex64::i();
    if x.im >= 0.0 {
        let e = (i * x * 2.0).exp();
        -i * (e - 1.0) / (e + 1.0)
    } else {
        let e = (-i * x * 2.0).exp();
        -i * (1.0 - e) / (1.0 + e)
    }
}

/// Normalized Taylor coefficients `f_n / f_0` of `(2 cos(s/2))^p` at `s0`, `n = 0..=order`.
fn power_taylor_ratios(s0: Complex64, p: f64, order: usize) -> Vec<Complex64> {
    let tan = tan_stable(s0 * 0.5);
    let mut u = Vec::with_capacity(order + 1);
    let mut scale = 1.0;
    for k in 0..=order {
        let rot = match k % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => -tan,
            2 => Complex64::new(-1.0, 0.0),
            _ => tan,
        };
        u.push(rot * scale);
        scale *= 0.5 / (k + 1) as f64;
    }
    // Miller's recurrence for powers of a series with u_0 = 1.
    let mut f = vec![Complex64::new(1.0, 0.0); order + 1];
    for n in 1..=order {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..=n {
            acc += u[k] * f[n - k] * (k as f64 * (p + 1.0) - n as f64);
        }
        f[n] = acc / n as f64;
    }
    f
}

/// `e^{ln_scale} sum_j |Gamma(c + i y_j)|^2 S(y_j) t^j` for the polynomial weight `S`.
pub(crate) fn resummed_gamma_series(
    c: f64,
    weight: &Poly,
    geom: &PairGeometry,
    ln_scale: f64,
    ctrl: &SeriesControl,
    what: &str,
) -> Result<SeriesSum> {
    // The resummed series converges up to the boundary, but values there are
    // as ill-conditioned as the direct series; keep the same domain contract.
    let (qp, qm) = geom.decay_ratios();
    check_decay(qp, ctrl, what)?;
    check_decay(qm, ctrl, what)?;
    let b = geom.b;
    let l = geom.ln_r / PI;
    let order = weight.degree();
    let derivative_weights: Vec<Complex64> = (0..=order).map(|n| weight.coeff(n) * factorial(n)).collect();
    let (lg, _) = log_gamma_real(2.0 * c)?;
    let tau = Complex64::new(geom.ln_abs_t, geom.arg_t);
    let base = tau * (-b) + (ln_scale + (2.0 * PI).ln() + lg - l.ln());
    let center = geom.arg_t / (2.0 * PI);
    let decay = Decay::new(resummation_ratio(c, geom.ln_r), 1.0);
    sum_bilateral(center.round() as i64, center, decay, Some(decay), ctrl, what, |k| {
        let s = (tau - Complex64::new(0.0, 2.0 * PI * k as f64)) / l;
        let ratios = power_taylor_ratios(s, -2.0 * c, order);
        let poly: Complex64 = derivative_weights.iter().zip(&ratios).map(|(w, f)| w * f).sum();
        let phase = Complex64::new(0.0, 2.0 * PI * (k as f64 * b).rem_euclid(1.0));
        Ok((base + phase - ln_two_cos(s * 0.5) * (2.0 * c)).exp() * poly)
    })
}

/// `prod_{r < n} (x0 + r + sign i y)` as a polynomial in `y`.
pub(crate) fn rising_poly(x0: f64, n: usize, sign: f64) -> Poly {
    (0..n)
        .fold(Poly::one(), |acc, r| &acc * &Poly::linear(Complex64::new(x0 + r as f64, 0.0), Complex64::new(0.0, sign)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::pair_geometry;
    use crate::special::gamma::log_gamma_abs_sq;
    use crate::{AnnulusParams, AnnulusPoint};

    #[test]
    fn ln_two_cos_matches_direct() {
        for x in [Complex64::new(0.3, 0.0), Complex64::new(-1.2, 2.5), Complex64::new(0.9, -7.0)] {
            let direct = (Complex64::new(2.0, 0.0) * x.cos()).ln();
            assert!((ln_two_cos(x) - direct).norm() < 1e-14, "{x}");
        }
        let far = ln_two_cos(Complex64::new(0.4, 900.0));
        assert!(far.re.is_finite() && (far.re - 900.0).abs() < 1e-9);
    }

    #[test]
    fn taylor_ratios_match_binomial_series() {
        // At s0 = 0, (2 cos(h/2))^p = 2^p (1 - h^2/8 + ...)^p.
        let f = power_taylor_ratios(Complex64::new(0.0, 0.0), -3.0, 4);
        assert!(f[1].norm() < 1e-16);
        assert!((f[2].re - 3.0 / 8.0).abs() < 1e-15);
        // Compare with finite differences at a complex point.
        let p = -2.5;
        let s0 = Complex64::new(0.7, 1.3);
        let g = |s: Complex64| (ln_two_cos(s * 0.5) * p).exp();
        let h = 1e-4;
        let d1 = (g(s0 + h) - g(s0 - h)) / (2.0 * h) / g(s0);
        let ratios = power_taylor_ratios(s0, p, 2);
        assert!((ratios[1] - d1).norm() < 1e-7);
    }

    #[test]
    fn resummation_reproduces_direct_series() {
        let params = AnnulusParams::new(4.0, 2.5).unwrap();
        let z = AnnulusPoint::new(Complex64::from_polar(1.7, 0.4), &params).unwrap();
        let w = AnnulusPoint::new(Complex64::from_polar(2.6, -1.1), &params).unwrap();
        let geom = pair_geometry(&z, &w, &params);
        let ctrl = SeriesControl::default();
        let c = 1.5;
        let weight = &rising_poly(c, 1, 1.0) * &rising_poly(c, 2, -1.0);
        let resummed = resummed_gamma_series(c, &weight, &geom, 0.0, &ctrl, "test").unwrap();
        let l = params.ln_r() / PI;
        let mut direct = Complex64::new(0.0, 0.0);
        for j in -200i64..200 {
            let y = (j as f64 + 2.5) * l;
            let g = log_gamma_abs_sq(c, y).unwrap();
            direct += geom.t_pow(j as f64) * g.exp() * weight.eval(Complex64::new(y, 0.0));
        }
        assert!((resummed.value - direct).norm() < 1e-13 * direct.norm(), "{} vs {direct}", resummed.value);
    }
}
