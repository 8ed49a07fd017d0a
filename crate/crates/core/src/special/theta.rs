//! Jacobi's fourth theta function with nome `q = 1/R`:
//! `theta4(z, R) = 1 + 2 sum_{k>=1} (-1)^k R^{-k^2} cos(2kz)`,
//! and its logarithmic derivatives as Lambert-type series.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{converged, SeriesControl, SeriesSum};

fn check_radius(r: f64, ctrl: &SeriesControl) -> Result<f64> {
    if !(r > 1.0 + ctrl.boundary_margin) {
        return Err(Error::InvalidParameter(format!("theta nome needs R > 1 + margin, got R = {r}")));
    }
    Ok(r.ln())
}

pub fn theta4(z: Complex64, r: f64, ctrl: &SeriesControl) -> Result<Complex64> {
    theta4_series(z, r, ctrl).map(|s| s.value)
}

pub fn theta4_series(z: Complex64, r: f64, ctrl: &SeriesControl) -> Result<SeriesSum> {
    let ln_r = check_radius(r, ctrl)?;
    let (x, y) = (z.re, z.im);
    let k_max = (ctrl.max_terms as f64).sqrt().floor() as usize;
    let mut sum = Complex64::new(1.0, 0.0);
    let mut abs_sum = 1.0;
    for k in 1..=k_max {
        let kf = k as f64;
        let base = -kf * kf * ln_r;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        // 2 q^{k^2} cos(2kz) without forming e^{2k|y|} separately.
        let term = Complex64::from_polar((base - 2.0 * kf * y).exp(), 2.0 * kf * x)
            + Complex64::from_polar((base + 2.0 * kf * y).exp(), -2.0 * kf * x);
        sum += term * sign;
        abs_sum += term.norm();
        // Bound of the remaining terms once the Gaussian factor dominates.
        let next = kf + 1.0;
        let ratio = (-(2.0 * kf + 1.0) * ln_r + 2.0 * y.abs()).exp();
        if ratio < 1.0 {
            let tail = 2.0 * (-next * next * ln_r + 2.0 * next * y.abs()).exp() / (1.0 - ratio);
            if converged(tail, sum.norm(), abs_sum, ctrl.tolerance) {
                return Ok(SeriesSum { value: sum, terms: k, tail_bound: tail });
            }
        }
    }
    Err(Error::Convergence(format!("theta4 at {z} with R = {r} did not converge within {k_max} terms")))
}

/// Derivative of order `order >= 1` of `log theta4(z, R)` in `z`:
/// `4 sum_{n>=1} R^n/(R^{2n}-1) (2n)^{order-1} sin^{(order-1)}(2nz)`.
///
/// Converges for `|Im z| < ln R / 2`.
pub fn theta4_log_derivative(order: usize, z: Complex64, r: f64, ctrl: &SeriesControl) -> Result<Complex64> {
    theta4_log_derivative_series(order, z, r, ctrl).map(|s| s.value)
}

pub fn theta4_log_derivative_series(order: usize, z: Complex64, r: f64, ctrl: &SeriesControl) -> Result<SeriesSum> {
    if order == 0 {
        return Err(Error::InvalidParameter("log-derivative order must be positive".into()));
    }
    let ln_r = check_radius(r, ctrl)?;
    let (x, y) = (z.re, z.im);
    let decay = (-(ln_r - 2.0 * y.abs())).exp();
    if decay > 1.0 - ctrl.boundary_margin {
        return Err(Error::Convergence(format!("theta4 log-derivative at {z}: |Im z| too close to ln R / 2")));
    }
    let r_deriv = order - 1;
    // sin^{(r)}(u) = (i^r e^{iu} - i^{-r} e^{-iu}) / (2i)
    let i_pow = Complex64::i().powu(r_deriv as u32);
    let i_pow_inv = i_pow.inv();
    let half_over_i = Complex64::new(0.0, -0.5);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for n in 1..=ctrl.max_terms {
        let nf = n as f64;
        let q2n = (-2.0 * nf * ln_r).exp();
        let weight = 4.0 * (2.0 * nf).powi(r_deriv as i32) / (1.0 - q2n);
        let up = Complex64::from_polar((-nf * (ln_r + 2.0 * y)).exp(), 2.0 * nf * x);
        let down = Complex64::from_polar((-nf * (ln_r - 2.0 * y)).exp(), -2.0 * nf * x);
        let term = (up * i_pow - down * i_pow_inv) * half_over_i * weight;
        sum += term;
        abs_sum += term.norm();
        let growth = ((nf + 1.0) / nf).powi(r_deriv as i32) * decay;
        if growth < 1.0 {
            let next =
                4.0 * (2.0 * nf + 2.0).powi(r_deriv as i32) * decay.powf(nf + 1.0) / (1.0 - q2n * (-2.0 * ln_r).exp());
            let tail = next / (1.0 - growth);
            if converged(tail, sum.norm(), abs_sum, ctrl.tolerance) {
                return Ok(SeriesSum { value: sum, terms: n, tail_bound: tail });
            }
        }
    }
    Err(Error::Convergence(format!("theta4 log-derivative of order {order} at {z} exceeded {} terms", ctrl.max_terms)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn value_at_origin() {
        let ctrl = SeriesControl::default();
        // 1 - 2/4 + 2/4^4 - 2/4^9 + 2/4^16
        let want = 1.0 - 0.5 + 2.0 / 256.0 - 2.0 / 262_144.0 + 2.0 / 4_294_967_296.0;
        let got = theta4(c(0.0, 0.0), 4.0, &ctrl).unwrap();
        assert!((got.re - want).abs() < 1e-12 && got.im.abs() < 1e-15);
        assert!((got.re - 0.507_81).abs() < 1e-5);
        let big = theta4(c(0.0, 0.0), 1e6, &ctrl).unwrap();
        assert!((big.re - (1.0 - 2e-6)).abs() < 1e-11);
    }

    #[test]
    fn periodicity_and_quasi_periodicity() {
        let ctrl = SeriesControl::default();
        for (z, r) in [(c(0.3, 0.2), 4.0), (c(-1.1, 0.05), 2.5), (c(0.7, -0.4), 9.0)] {
            let base = theta4(z, r, &ctrl).unwrap();
            let shifted = theta4(z + PI, r, &ctrl).unwrap();
            assert!((base - shifted).norm() <= 1e-13 * base.norm());
            let lattice = theta4(z + c(0.0, r.ln()), r, &ctrl).unwrap();
            let rule = -(c(r.ln(), 0.0) - c(0.0, 2.0) * z).exp() * base;
            assert!((lattice - rule).norm() <= 1e-10 * rule.norm(), "{z}: {lattice} vs {rule}");
        }
    }

    #[test]
    fn log_derivative_trivial_zeros() {
        let ctrl = SeriesControl::default();
        assert!(theta4_log_derivative(1, c(0.0, 0.0), 4.0, &ctrl).unwrap().norm() < 1e-15);
        assert!(theta4_log_derivative(1, c(PI / 2.0, 0.0), 4.0, &ctrl).unwrap().norm() < 1e-14);
    }

    #[test]
    fn log_derivatives_match_finite_differences() {
        let ctrl = SeriesControl::default();
        let r = 4.0;
        let log_theta_ratio =
            |a: Complex64, b: Complex64| (theta4(a, r, &ctrl).unwrap() / theta4(b, r, &ctrl).unwrap()).ln();
        for z in [c(0.0, 0.3), c(0.4, -0.2), c(1.2, 0.5)] {
            let h = 1e-4;
            // Richardson step removes the h^2 term of the central difference.
            let central = |h: f64| log_theta_ratio(z + h, z - h) / (2.0 * h);
            let d1 = (central(h / 2.0) * 4.0 - central(h)) / 3.0;
            let s1 = theta4_log_derivative(1, z, r, &ctrl).unwrap();
            assert!((d1 - s1).norm() < 1e-8, "order 1 at {z}: {d1} vs {s1}");
            let plus = log_theta_ratio(z + h, z);
            let minus = log_theta_ratio(z - h, z);
            let d2 = (plus + minus) / (h * h);
            let s2 = theta4_log_derivative(2, z, r, &ctrl).unwrap();
            assert!((d2 - s2).norm() < 1e-6 * s2.norm().max(1.0), "order 2 at {z}: {d2} vs {s2}");
        }
    }

    #[test]
    fn higher_orders_chain() {
        // The order-(s+1) series is the derivative of the order-s series.
        let ctrl = SeriesControl::default();
        let z = c(0.25, 0.35);
        let h = 1e-3;
        for s in 1..=5 {
            let f = |u: Complex64| theta4_log_derivative(s, u, 9.0, &ctrl).unwrap();
            let fd = (f(z - 2.0 * h) - f(z + 2.0 * h) + (f(z + h) - f(z - h)) * 8.0) / (12.0 * h);
            let next = theta4_log_derivative(s + 1, z, 9.0, &ctrl).unwrap();
            assert!((fd - next).norm() < 1e-7 * next.norm().max(1.0), "s = {s}");
        }
    }

    #[test]
    fn growth_condition_is_enforced() {
        let ctrl = SeriesControl::default();
        assert!(matches!(theta4_log_derivative(1, c(0.0, 0.7), 4.0, &ctrl), Err(Error::Convergence(_))));
        assert!(theta4(c(0.0, 0.0), 1.0, &ctrl).is_err());
    }
}
