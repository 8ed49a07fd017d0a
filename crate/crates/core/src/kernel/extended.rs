//! Double-double evaluation of the integer-`B` series (product formula,
//! `B = 1` kernel, theta log-derivatives).
//!
//! These series cancel like the closed form does: for some interior pairs the
//! sum of moduli exceeds the value by `10^9`, so rounding each term in `f64`
//! would limit them to about `1e-7` relative. Powers of `t = z conj(w)/R`, the
//! Lambert weights and the polynomial weights are formed in double-double
//! instead; only factors common to every term stay in `f64`.

use super::series::{check_decay, Decay};
use crate::error::{Error, Result};
use crate::geometry::{AnnulusParams, AnnulusPoint};
use crate::special::dd::{Dd, DdComplex};
use crate::special::{SeriesControl, SeriesSum};

/// Terms below this fraction of the absolute sum are beneath double-double rounding.
const DD_FLOOR: f64 = 1e-32;

/// `t = z conj(w) / R` with exact products.
pub(crate) fn dd_t(z: &AnnulusPoint, w: &AnnulusPoint, params: &AnnulusParams) -> DdComplex {
    DdComplex::mul_conj(z.z(), w.z()).scale(Dd::new(1.0) / params.r())
}

/// `n / (R^n - R^{-n})`, even in `n`, equal to `1 / (2 ln R)` at `n = 0`.
pub(crate) fn lambert_dd(n: i64, ln_r: Dd) -> Dd {
    if n == 0 {
        return Dd::new(0.5) / ln_r;
    }
    let u = n.unsigned_abs() as f64;
    let q = (-(ln_r * u)).exp();
    q * u / (Dd::new(1.0) - q * q)
}

fn stopped(tail: f64, sum: f64, abs_sum: f64, tol: f64) -> bool {
    tail <= tol * sum || tail <= DD_FLOOR * abs_sum
}

/// `sum_n weight(n) t^n` over all integers `n`, outward from 0.
pub(crate) fn sum_powers_dd<F>(
    t: DdComplex,
    plus: Decay,
    minus: Decay,
    ctrl: &SeriesControl,
    what: &str,
    mut weight: F,
) -> Result<SeriesSum>
where
    F: FnMut(i64) -> Result<DdComplex>,
{
    check_decay(plus.q, ctrl, what)?;
    check_decay(minus.q, ctrl, what)?;
    let mut sum = weight(0)?;
    let mut abs_sum = sum.norm();
    // (step, power, decay, envelope, tail, done)
    let mut arms = [(t, t, plus, 0.0, f64::INFINITY, false), (t.inv(), t.inv(), minus, 0.0, f64::INFINITY, false)];
    let mut terms = 1;
    for n in 1..=ctrl.max_terms as i64 {
        for (side, arm) in arms.iter_mut().enumerate() {
            if arm.5 {
                continue;
            }
            let j = if side == 0 { n } else { -n };
            let term = weight(j)? * arm.1;
            arm.1 = arm.1 * arm.0;
            sum = sum + term;
            let modulus = term.norm();
            abs_sum += modulus;
            terms += 1;
            let rho = arm.2.q * ((n as f64 + 1.0) / n as f64).powf(arm.2.degree);
            arm.3 = modulus.max(arm.3 * rho.min(1.0));
            arm.4 = if rho < 1.0 { arm.3 * rho / (1.0 - rho) } else { f64::INFINITY };
        }
        let value = sum.norm();
        for arm in arms.iter_mut() {
            arm.5 = stopped(arm.4, value, abs_sum, 0.5 * ctrl.tolerance);
        }
        if arms.iter().all(|a| a.5) {
            return Ok(SeriesSum { value: sum.to_complex(), terms, tail_bound: arms[0].4 + arms[1].4 });
        }
    }
    Err(Error::Convergence(format!("{what}: no convergence within {} terms per direction", ctrl.max_terms)))
}

/// Order-`order` derivative of `log theta4` at `z0 = (i/2) log t`, with nome `1/R`:
/// `sum_{n>=1} 4 (2n)^{order-1} / (1 - R^{-2n}) (i^{order-1} (q/t)^n - i^{1-order} (q t)^n) / (2i)`.
pub(crate) fn theta4_log_derivative_dd(
    order: usize,
    t: DdComplex,
    ln_r: Dd,
    ctrl: &SeriesControl,
) -> Result<DdComplex> {
    if order == 0 {
        return Err(Error::InvalidParameter("log-derivative order must be positive".into()));
    }
    let q = (-ln_r).exp();
    let up_step = t.inv().scale(q);
    let down_step = t.scale(q);
    let decay = up_step.norm().max(down_step.norm());
    check_decay(decay, ctrl, "theta4 log-derivative")?;
    let r_deriv = order as i64 - 1;
    let (mut up, mut down) = (up_step, down_step);
    let mut sum = DdComplex::zero();
    let mut abs_sum = 0.0;
    let mut envelope: f64 = 0.0;
    for n in 1..=ctrl.max_terms {
        let nf = n as f64;
        let q2n = (-(ln_r * (2.0 * nf))).exp();
        let weight = Dd::new(4.0 * (2.0 * nf).powi(r_deriv as i32)) / (Dd::new(1.0) - q2n);
        // (a - b) / (2i) = -i (a - b) / 2
        let term = (up.rotate(r_deriv) - down.rotate(-r_deriv)).rotate(3).scale(weight * 0.5);
        sum = sum + term;
        let modulus = term.norm();
        abs_sum += modulus;
        up = up * up_step;
        down = down * down_step;
        let rho = decay * ((nf + 1.0) / nf).powi(r_deriv as i32);
        envelope = modulus.max(envelope * rho.min(1.0));
        if rho < 1.0 && stopped(envelope * rho / (1.0 - rho), 0.0, abs_sum, 0.0) {
            return Ok(sum);
        }
    }
    Err(Error::Convergence(format!("theta4 log-derivative of order {order} exceeded {} terms", ctrl.max_terms)))
}

/// Product of polynomials with double-double complex coefficients.
pub(crate) fn poly_mul_dd(a: &[DdComplex], b: &[DdComplex]) -> Vec<DdComplex> {
    let mut out = vec![DdComplex::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j] + *x * *y;
        }
    }
    out
}

/// `(x0 + i s y)` as a polynomial in `y`.
pub(crate) fn linear_dd(x0: f64, s: Dd) -> Vec<DdComplex> {
    vec![DdComplex::new(Dd::new(x0), Dd::new(0.0)), DdComplex::new(Dd::new(0.0), s)]
}

/// Evaluates a double-double polynomial at a real double-double point.
pub(crate) fn poly_eval_dd(p: &[DdComplex], x: Dd) -> DdComplex {
    p.iter().rev().fold(DdComplex::zero(), |acc, c| acc.scale(x) + *c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::theta::theta4_log_derivative;
    use num_complex::Complex64;

    #[test]
    fn lambert_weight_limits() {
        let ln_r = Dd::new(4.0).ln();
        assert!((lambert_dd(0, ln_r).to_f64() - 0.5 / 4f64.ln()).abs() < 1e-16);
        let want = 3.0 / (64.0 - 1.0 / 64.0);
        assert!((lambert_dd(-3, ln_r).to_f64() - want).abs() < 1e-16 * want);
    }

    #[test]
    fn geometric_power_sum() {
        // sum_n 2^{-|n|} t^n = 1 + t/(2 - t) + (1/t)/(2 - 1/t)
        let t = Complex64::from_polar(0.8, 0.6);
        let ctrl = SeriesControl::default();
        let d = Decay::new(0.5 * 1.25, 0.0);
        let s = sum_powers_dd(DdComplex::from(t), d, d, &ctrl, "geo", |n| {
            Ok(DdComplex::one().scale_f64(0.5f64.powi(n.abs() as i32)))
        })
        .unwrap();
        let want = 1.0 + t / (2.0 - t) + t.inv() / (2.0 - t.inv());
        assert!((s.value - want).norm() < 1e-15 * want.norm());
    }

    #[test]
    fn theta_derivatives_match_f64_series() {
        let ctrl = SeriesControl::default();
        let r: f64 = 4.0;
        let t = Complex64::from_polar(1.3, 0.9);
        let z0 = Complex64::new(-0.5 * t.arg(), 0.5 * t.norm().ln());
        for order in 1..=6 {
            let dd = theta4_log_derivative_dd(order, DdComplex::from(t), Dd::new(r).ln(), &ctrl).unwrap().to_complex();
            let f = theta4_log_derivative(order, z0, r, &ctrl).unwrap();
            assert!((dd - f).norm() < 1e-12 * f.norm().max(1.0), "order {order}: {dd} vs {f}");
        }
    }
}
