//! Complex log-Gamma and the Gamma-pair products built on it.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

const LN_PI: f64 = 1.144_729_885_849_400_2;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Modulus above which the Stirling series is summed directly.
const STIRLING_MIN: f64 = 15.0;

/// Stirling coefficients B_{2k} / (2k (2k - 1)), k = 1..=10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43_867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.floor()
}

fn stirling(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut corr = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        corr += pow * c;
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + corr
}

/// Principal logarithm of sin(pi z), safe for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im.abs() < 10.0 {
        return (z * PI).sin().ln();
    }
    if z.im < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 pi i z}) for Im z > 0.
    let small = (Complex64::i() * 2.0 * PI * z).exp();
    let rest = (Complex64::new(1.0, 0.0) - small).ln();
    let re = -LN_2 + PI * z.im + rest.re;
    let im = 0.5 * PI - PI * z.re + rest.im;
    let wrapped = im - 2.0 * PI * ((im + PI) / (2.0 * PI)).floor();
    let wrapped = if wrapped == -PI { PI } else { wrapped };
    Complex64::new(re, wrapped)
}

/// Log-Gamma on the branch continued analytically from the positive real axis.
///
/// Stirling series for |z| >= 15, upward recurrence below that, reflection for
/// Re z < 1/2.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::Pole(z.re));
    }
    if z.re < 0.5 {
        let branch = (2.0 * PI).copysign(z.im) * (0.5 * z.re + 0.25).floor();
        let reflected = log_gamma(Complex64::new(1.0, 0.0) - z)?;
        return Ok(Complex64::new(LN_PI, branch) - ln_sin_pi(z) - reflected);
    }
    if z.norm() >= STIRLING_MIN {
        return Ok(stirling(z));
    }
    let shift = (STIRLING_MIN - z.re).ceil().max(0.0) as usize;
    // One logarithm of the accumulated modulus keeps the real part accurate;
    // the arguments are summed to stay on the continued branch.
    let mut modulus = 1.0;
    let mut arg = 0.0;
    for k in 0..shift {
        let factor = z + k as f64;
        modulus *= factor.norm();
        arg += factor.arg();
    }
    Ok(stirling(z + shift as f64) - Complex64::new(modulus.ln(), arg))
}

/// Real log-Gamma through the complex routine; returns ln|Gamma(x)| and the sign.
pub fn log_gamma_real(x: f64) -> Result<(f64, f64)> {
    let lg = log_gamma(Complex64::new(x, 0.0))?;
    let sign = if x > 0.0 || (x.floor() as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Ok((lg.re, sign))
}

/// Gamma of a real argument, with sign.
pub fn gamma_real(x: f64) -> Result<f64> {
    let (lg, sign) = log_gamma_real(x)?;
    Ok(sign * lg.exp())
}

/// |Gamma(x + iy)|^2, evaluated as exp(2 Re log Gamma) so that the pair never
/// underflows before the final exponential.
pub fn gamma_abs_sq(x: f64, y: f64) -> Result<f64> {
    Ok((2.0 * log_gamma(Complex64::new(x, y))?.re).exp())
}

/// ln |Gamma(x + iy)|^2.
///
/// Integer and half-integer `x` use the elementary forms
/// `|Gamma(n+iy)|^2 = pi y/sinh(pi y) prod_{k<n} (k^2+y^2)` and
/// `|Gamma(n+1/2+iy)|^2 = pi/cosh(pi y) prod_{k<n} ((k+1/2)^2+y^2)`, which keep
/// a few-ulp relative accuracy where the general routine loses digits to the
/// upward shift.
pub fn log_gamma_abs_sq(x: f64, y: f64) -> Result<f64> {
    if x > 0.0 && x <= ELEMENTARY_MAX && (2.0 * x).fract() == 0.0 {
        return Ok(log_gamma_abs_sq_elementary(x, y));
    }
    Ok(2.0 * log_gamma(Complex64::new(x, y))?.re)
}

const ELEMENTARY_MAX: f64 = 64.0;

fn log_gamma_abs_sq_elementary(x: f64, y: f64) -> f64 {
    let a = PI * y.abs();
    let half = x.fract() != 0.0;
    let head = if half {
        // ln(pi / cosh a)
        LN_PI - (a + (-2.0 * a).exp().ln_1p() - LN_2)
    } else if a == 0.0 {
        0.0
    } else if a < 20.0 {
        (a / a.sinh()).ln()
    } else {
        (2.0 * a).ln() - a - (-(-2.0 * a).exp()).ln_1p()
    };
    let start = if half { 0.5 } else { 1.0 };
    let y2 = y * y;
    let mut prod = 1.0;
    let mut logs = 0.0;
    let mut k = start;
    while k < x {
        prod *= k * k + y2;
        if prod > 1e250 {
            logs += prod.ln();
            prod = 1.0;
        }
        k += 1.0;
    }
    head + logs + prod.ln()
}

/// `j R^j / (R^{2j} - 1)`, even in `j`, with the removable value `1/(2 ln R)` at `j = 0`.
pub fn lambert_weight(j: i64, ln_r: f64) -> f64 {
    if j == 0 {
        return 0.5 / ln_r;
    }
    let n = j.unsigned_abs() as f64;
    let decay = (-n * ln_r).exp();
    n * decay / (1.0 - decay * decay)
}

/// Gamma(n + i j ln R/pi) Gamma(n - i j ln R/pi) for integer n = B - l >= 1,
/// through the finite product
/// `2 ln R Gamma(n)^2 j R^j/(R^{2j}-1) prod_{q<n} (1 + (j ln R)^2/(pi q)^2)`.
pub fn gamma_pair_product_integer(b: u32, l: u32, j: i64, r: f64) -> Result<f64> {
    if l >= b {
        return Err(Error::InvalidParameter(format!("B - l must be a positive integer (B = {b}, l = {l})")));
    }
    if !(r > 1.0) {
        return Err(Error::InvalidParameter(format!("R must exceed 1, got {r}")));
    }
    let n = b - l;
    let ln_r = r.ln();
    let gamma_n: f64 = (1..n).map(f64::from).product();
    let arg = j as f64 * ln_r / PI;
    let poly: f64 = (1..n).map(|q| 1.0 + (arg / f64::from(q)).powi(2)).product();
    Ok(2.0 * ln_r * gamma_n * gamma_n * lambert_weight(j, ln_r) * poly)
}

/// Rising factorial (a)_n as an explicit product.
pub fn pochhammer(a: Complex64, n: usize) -> Complex64 {
    (0..n).fold(Complex64::new(1.0, 0.0), |acc, i| acc * (a + i as f64))
}

/// Real rising factorial.
pub fn pochhammer_real(a: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, i| acc * (a + i as f64))
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn classical_values() {
        assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-13);
        assert!(log_gamma(c(2.0, 0.0)).unwrap().norm() < 1e-13);
        let half = log_gamma(c(0.5, 0.0)).unwrap();
        assert_relative_eq!(half.re, 0.5 * PI.ln(), max_relative = 1e-14);
        assert!(half.im.abs() < 1e-15);
        assert_relative_eq!(gamma_real(5.0).unwrap(), 24.0, max_relative = 1e-14);
        assert_relative_eq!(gamma_real(-0.5).unwrap(), -2.0 * PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma_real(-1.5).unwrap(), 4.0 * PI.sqrt() / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn elementary_gamma_pairs_match_general_routine() {
        for x in [0.5, 1.0, 1.5, 2.0, 3.0, 4.5, 7.0, 12.5] {
            for y in [0.0, 1e-9, 0.3, 2.0, 9.7, 30.0, 150.0] {
                let exact = log_gamma_abs_sq(x, y).unwrap();
                let general = 2.0 * log_gamma(c(x, y)).unwrap().re;
                assert!((exact - general).abs() <= 1e-12 * general.abs().max(1.0), "x = {x}, y = {y}");
            }
        }
        // |Gamma(1/2 + iy)|^2 = pi / cosh(pi y), |Gamma(1 + iy)|^2 = pi y / sinh(pi y).
        assert_relative_eq!(log_gamma_abs_sq(0.5, 0.4).unwrap().exp(), PI / (0.4 * PI).cosh(), max_relative = 1e-15);
        assert_relative_eq!(
            log_gamma_abs_sq(1.0, 0.4).unwrap().exp(),
            0.4 * PI / (0.4 * PI).sinh(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn poles_are_rejected() {
        for x in [0.0, -1.0, -7.0] {
            assert_eq!(log_gamma(c(x, 0.0)), Err(Error::Pole(x)));
        }
        assert!(gamma_abs_sq(-3.0, 0.0).is_err());
        assert!(log_gamma(c(-3.0, 1e-3)).is_ok());
    }

    #[test]
    fn recurrence_from_stirling_start() {
        // Walk down 20 steps from z + 20, where the Stirling series is used directly.
        let z = c(3.0, 4.0);
        let mut acc = log_gamma(z + 20.0).unwrap();
        for k in (0..20).rev() {
            acc -= (z + k as f64).ln();
        }
        let direct = log_gamma(z).unwrap();
        assert!((direct - acc).norm() <= 1e-12 * direct.norm());
    }

    #[test]
    fn reference_values_continuation_branch() {
        // mpmath.loggamma at 30 digits.
        let cases = [
            (c(3.0, 4.0), c(-1.756_626_784_603_784_1, 4.742_664_438_034_657_9)),
            (c(-2.5, 0.3), c(-0.432_088_892_613_201_92, -9.093_345_421_289_741_5)),
            (c(-4.2, -3.1), c(-10.428_625_639_063_011, 9.763_673_615_842_078)),
            (c(0.2, 40.0), c(-63.019_573_374_362_728, 107.083_855_923_113_95)),
            (c(-30.3, 0.7), c(-76.042_184_196_895_275, -94.373_354_788_490_234)),
        ];
        for (z, want) in cases {
            let got = log_gamma(z).unwrap();
            assert!((got - want).norm() <= 1e-12 * want.norm().max(1.0), "{z}: {got} vs {want}");
        }
    }

    #[test]
    fn abs_sq_reflection_identity() {
        assert_relative_eq!(gamma_abs_sq(2.0, 0.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(gamma_abs_sq(1.0, 1.0).unwrap(), PI / PI.sinh(), max_relative = 1e-13);
        for y in [0.1_f64, 1.0, 5.0, 20.0] {
            let v = gamma_abs_sq(1.0, y).unwrap() * (PI * y).sinh() / (PI * y);
            assert!((v - 1.0).abs() < 1e-10, "y = {y}: {v}");
        }
    }

    #[test]
    fn large_imaginary_part_stays_finite() {
        // |Gamma(3 + 300 i)|^2 ~ 2 pi 300^5 e^{-300 pi}: far below f64 range for Gamma itself
        // but representable in log space.
        let l = log_gamma_abs_sq(3.0, 300.0).unwrap();
        let approx = (2.0 * PI).ln() + 5.0 * 300f64.ln() - 300.0 * PI;
        assert!((l - approx).abs() < 1e-4);
    }

    #[test]
    fn product_formula_examples() {
        let e = std::f64::consts::E;
        let v = gamma_pair_product_integer(1, 0, 1, e).unwrap();
        assert_relative_eq!(v, 2.0 * e / (e * e - 1.0), max_relative = 1e-14);
        assert_relative_eq!(v, gamma_abs_sq(1.0, 1.0 / PI).unwrap(), max_relative = 1e-12);
        for n in 1..5u32 {
            let g = gamma_real(f64::from(n)).unwrap();
            assert_relative_eq!(gamma_pair_product_integer(n, 0, 0, 3.0).unwrap(), g * g, max_relative = 1e-14);
        }
        assert_eq!(
            gamma_pair_product_integer(3, 1, -4, 2.0).unwrap(),
            gamma_pair_product_integer(3, 1, 4, 2.0).unwrap()
        );
        assert!(gamma_pair_product_integer(2, 2, 1, 2.0).is_err());
    }

    #[test]
    fn product_formula_matches_log_space() {
        for n in 1..=4u32 {
            for r in [2.0_f64, 4.0, 10.0] {
                for j in -30..=30i64 {
                    let prod = gamma_pair_product_integer(n, 0, j, r).unwrap();
                    let direct = gamma_abs_sq(f64::from(n), j as f64 * r.ln() / PI).unwrap();
                    assert!((prod / direct - 1.0).abs() < 1e-10, "n={n} r={r} j={j}");
                }
            }
        }
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(c(3.7, -1.0), 0), c(1.0, 0.0));
        assert_eq!(pochhammer(c(1.0, 0.0), 4), c(24.0, 0.0));
        // (1 - 2B + m)_{k+l} with B = 3, m = 2, k = l = 1.
        assert_eq!(pochhammer_real(1.0 - 6.0 + 2.0, 2), 6.0);
    }

    proptest! {
        #[test]
        fn recurrence_holds(re in 0.5f64..50.0, im in -50.0f64..50.0) {
            let z = c(re, im);
            let next = log_gamma(z + 1.0).unwrap();
            let here = log_gamma(z).unwrap();
            let resid = (next - here - z.ln()).norm();
            prop_assert!(resid <= 1e-12 * next.norm().max(1.0));
        }

        #[test]
        fn conjugate_symmetry(re in -20.0f64..40.0, im in 0.01f64..80.0) {
            let a = log_gamma(c(re, im)).unwrap();
            let b = log_gamma(c(re, -im)).unwrap();
            prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1.0));
        }
    }
}
