//! Reproducing kernels `K_m` of the Landau eigenspaces and their alternative
//! representations.
//!
//! The closed form is the double sum over `(k, l)`, `k + l <= m`, of
//! `(1-2B+m)_{k+l} / ((m-k-l)! k! l!) * conj(V)^k V^l * sigma_{k,l}` with prefactor
//! `(2 pi)^{2B-3} (2B-2m-1) / (R^B (ln R)^{2B-1} Gamma(2B-m))`. `conj(V)` carries
//! the index of the `Gamma(B-k+i alpha/2)` factor; this pairing is what the basis
//! sum `sum_j Phi_j(z) conj(Phi_j(w))` gives for every level, and no extra
//! `(-1)^m` appears. Pairing `V^k` with that factor instead agrees only at `m = 0`.
//!
//! The `j`-series inside the closed form is summed after Poisson resummation
//! whenever that converges quickly (see [`dual`]), and term by term otherwise.

mod dual;
mod engine;
mod extended;
mod oracle;
pub(crate) mod series;
mod theta_path;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{invert_point, xi_coordinate, AnnulusParams, AnnulusPoint};
use crate::special::dd::{Dd, DdComplex};
use crate::special::gamma::{factorial, gamma_real, log_gamma_abs_sq, log_gamma_real, pochhammer_real};
use crate::special::jacobi::{jacobi_poly, JacobiParams};
use crate::special::poly::Poly;
use crate::special::{SeriesControl, SeriesSum};
use crate::spectral::LevelIndex;
use dual::{resummation_applies, resummed_gamma_series, rising_poly};
use extended::{dd_t, lambert_dd, linear_dd, poly_eval_dd, poly_mul_dd, sum_powers_dd};
use series::{sum_bilateral, Decay};

pub use engine::KernelEngine;
pub use oracle::{kernel_basis_sum_auto, kernel_basis_sum_oracle};
pub use theta_path::{kernel_km_theta, sigma_theta_path};

/// Pair quantities shared by every kernel series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGeometry {
    /// `t = z conj(w) / R`.
    pub t: Complex64,
    pub ln_abs_t: f64,
    pub arg_t: f64,
    /// `cot(pi ln|z| / ln R)`.
    pub x: f64,
    /// `cot(pi ln|w| / ln R)`.
    pub y: f64,
    /// `V = (1 + iX)(1 + iY) / 4`.
    pub v: Complex64,
    b: f64,
    ln_r: f64,
}

impl PairGeometry {
    /// `mu_j = i (j + B) ln R / pi`.
    pub fn mu(&self, j: i64) -> Complex64 {
        Complex64::new(0.0, (j as f64 + self.b) * self.ln_r / PI)
    }

    /// `|z conj(w)|`.
    pub fn abs_zw(&self) -> f64 {
        (self.ln_abs_t + self.ln_r).exp()
    }

    /// Decay ratios `q+ = |z w|/R^2` and `q- = 1/|z w|` of the bilateral series.
    pub fn decay_ratios(&self) -> (f64, f64) {
        ((self.ln_abs_t - self.ln_r).exp(), (-(self.ln_abs_t + self.ln_r)).exp())
    }

    /// `t^j`, formed from the logarithm.
    pub fn t_pow(&self, j: f64) -> Complex64 {
        Complex64::from_polar((j * self.ln_abs_t).exp(), j * self.arg_t)
    }
}

pub fn pair_geometry(z: &AnnulusPoint, w: &AnnulusPoint, params: &AnnulusParams) -> PairGeometry {
    let ln_abs_t = z.ln_modulus() + w.ln_modulus() - params.ln_r();
    let arg_t = z.arg() - w.arg();
    let x = xi_coordinate(z, params);
    let y = xi_coordinate(w, params);
    let i = Complex64::i();
    PairGeometry {
        t: Complex64::from_polar(ln_abs_t.exp(), arg_t),
        ln_abs_t,
        arg_t,
        x,
        y,
        v: (1.0 + i * x) * (1.0 + i * y) * 0.25,
        b: params.b(),
        ln_r: params.ln_r(),
    }
}

/// Which representation produced a kernel value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelPath {
    ClosedForm,
    BasisSum,
    Theta,
    ProductFormula,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelEvaluation {
    #[serde(with = "complex_serde")]
    pub value: Complex64,
    pub path: KernelPath,
    pub terms_used: usize,
    pub tail_bound: f64,
}

impl KernelEvaluation {
    fn from_sum(sum: SeriesSum, path: KernelPath) -> Self {
        Self { value: sum.value, path, terms_used: sum.terms, tail_bound: sum.tail_bound }
    }
}

pub(crate) mod complex_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

pub(crate) fn require_integer_b(params: &AnnulusParams, what: &str) -> Result<u32> {
    params
        .integer_b()
        .ok_or_else(|| Error::UnsupportedPath(format!("{what} requires an integer B, got B = {}", params.b())))
}

/// `ln` of `(2 pi)^{2B-3} (2B-2m-1) / (R^B (ln R)^{2B-1} Gamma(2B-m))`.
pub(crate) fn log_prefactor(m: usize, params: &AnnulusParams) -> Result<f64> {
    let b = params.b();
    let mf = m as f64;
    let (lg, _) = log_gamma_real(2.0 * b - mf)?;
    Ok((2.0 * b - 3.0) * (2.0 * PI).ln() + (2.0 * b - 2.0 * mf - 1.0).ln()
        - b * params.ln_r()
        - (2.0 * b - 1.0) * params.ln_r().ln()
        - lg)
}

/// Coefficients `(1-2B+m)_{k+l} / ((m-k-l)! k! l!)` indexed `[k][l]`, zero for `k + l > m`.
pub(crate) fn double_sum_coefficients(m: usize, b: f64) -> Vec<Vec<f64>> {
    let base = 1.0 - 2.0 * b + m as f64;
    (0..=m)
        .map(|k| {
            (0..=m)
                .map(|l| {
                    if k + l > m {
                        0.0
                    } else {
                        pochhammer_real(base, k + l) / (factorial(m - k - l) * factorial(k) * factorial(l))
                    }
                })
                .collect()
        })
        .collect()
}

/// `A_k = (B - m + i y)_{m-k}` for `k = 0..=m`, built downward from `A_m = 1`.
pub(crate) fn rising_ladder(m: usize, b: f64, y: f64) -> Vec<Complex64> {
    let mut a = vec![Complex64::new(1.0, 0.0); m + 1];
    for k in (0..m).rev() {
        a[k] = a[k + 1] * Complex64::new(b - k as f64 - 1.0, y);
    }
    a
}

/// Combination `sum c_kl conj(V)^k V^l A_k conj(A_l)` at one ladder point.
pub(crate) fn level_polynomial(coeffs: &[Vec<f64>], v: Complex64, a: &[Complex64]) -> Complex64 {
    let m = a.len() - 1;
    let vb = v.conj();
    let mut u = Vec::with_capacity(m + 1);
    let mut w = Vec::with_capacity(m + 1);
    let (mut pu, mut pw) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
    for k in 0..=m {
        u.push(pu * a[k]);
        w.push(pw * a[k].conj());
        pu *= vb;
        pw *= v;
    }
    let mut s = Complex64::new(0.0, 0.0);
    for k in 0..=m {
        for l in 0..=(m - k) {
            s += u[k] * w[l] * coeffs[k][l];
        }
    }
    s
}

/// Decay models of a `|Gamma(c + i y_j)|^2 t^j` series with polynomial weight of degree `extra`.
pub(crate) fn gamma_series_decay(geom: &PairGeometry, c: f64, extra: f64) -> (Decay, Decay) {
    let (qp, qm) = geom.decay_ratios();
    // One extra power absorbs the O(1/y) corrections to the Gamma asymptotics.
    let degree = (2.0 * c - 1.0).max(0.0) + extra + 1.0;
    (Decay::new(qp, degree), Decay::new(qm, degree))
}

pub(crate) fn series_start(params: &AnnulusParams) -> i64 {
    -(params.b().round() as i64)
}

/// `sum c_kl conj(V)^k V^l A_k(y) conj(A_l)(y)` as a polynomial in `y`.
fn level_weight_poly(coeffs: &[Vec<f64>], v: Complex64, m: usize, b: f64) -> Poly {
    let c = b - m as f64;
    let up: Vec<Poly> = (0..=m).map(|k| rising_poly(c, m - k, 1.0).scale(v.conj().powu(k as u32))).collect();
    let down: Vec<Poly> = (0..=m).map(|l| rising_poly(c, m - l, -1.0).scale(v.powu(l as u32))).collect();
    let mut out = Poly::constant(Complex64::new(0.0, 0.0));
    for k in 0..=m {
        for l in 0..=(m - k) {
            out = &out + &(&up[k] * &down[l]).scale(Complex64::new(coeffs[k][l], 0.0));
        }
    }
    out
}

/// Closed form, resummed when possible, else summed with the supplied
/// `ln |Gamma(B - m + i y_j)|^2` ladder.
pub(crate) fn kernel_km_with<L>(
    m: LevelIndex,
    geom: &PairGeometry,
    params: &AnnulusParams,
    ctrl: &SeriesControl,
    ladder: L,
) -> Result<KernelEvaluation>
where
    L: Fn(i64) -> Result<f64>,
{
    let c = params.b() - m.get() as f64;
    if !resummation_applies(c, params.ln_r()) {
        return kernel_km_terms(m, geom, params, ctrl, ladder);
    }
    let mi = m.get();
    let weight = level_weight_poly(&double_sum_coefficients(mi, params.b()), geom.v, mi, params.b());
    let sum = resummed_gamma_series(c, &weight, geom, log_prefactor(mi, params)?, ctrl, "kernel series")?;
    Ok(KernelEvaluation::from_sum(sum, KernelPath::ClosedForm))
}

fn kernel_km_terms<L>(
    m: LevelIndex,
    geom: &PairGeometry,
    params: &AnnulusParams,
    ctrl: &SeriesControl,
    ladder: L,
) -> Result<KernelEvaluation>
where
    L: Fn(i64) -> Result<f64>,
{
    let m = m.get();
    let b = params.b();
    let lpi = params.ln_r() / PI;
    let ln_pre = log_prefactor(m, params)?;
    let coeffs = double_sum_coefficients(m, b);
    let (plus, minus) = gamma_series_decay(geom, b - m as f64, 2.0 * m as f64);
    let sum = sum_bilateral(series_start(params), -b, plus, Some(minus), ctrl, "kernel series", |j| {
        let y = (j as f64 + b) * lpi;
        let modulus = (ln_pre + ladder(j)? + j as f64 * geom.ln_abs_t).exp();
        let poly = level_polynomial(&coeffs, geom.v, &rising_ladder(m, b, y));
        Ok(Complex64::from_polar(modulus, j as f64 * geom.arg_t) * poly)
    })?;
    Ok(KernelEvaluation::from_sum(sum, KernelPath::ClosedForm))
}

pub(crate) fn direct_ladder(m: usize, params: &AnnulusParams) -> impl Fn(i64) -> Result<f64> + '_ {
    let c = params.b() - m as f64;
    let lpi = params.ln_r() / PI;
    move |j| log_gamma_abs_sq(c, (j as f64 + params.b()) * lpi)
}

/// The level-`m` reproducing kernel in closed form.
pub fn kernel_km(
    m: LevelIndex,
    z: &AnnulusPoint,
    w: &AnnulusPoint,
    params: &AnnulusParams,
    ctrl: &SeriesControl,
) -> Result<KernelEvaluation> {
    let geom = pair_geometry(z, w, params);
    kernel_km_with(m, &geom, params, ctrl, direct_ladder(m.get(), params))
}

/// The closed form summed term by term over `j`, without resummation.
///
/// Loses accuracy to cancellation for some pairs; kept as a reference for
/// the resummed evaluation used by [`kernel_km`].
pub fn kernel_km_direct(
    m: LevelIndex,
    z: &AnnulusPoint,
    w: &AnnulusPoint,
    params: &AnnulusParams,
    ctrl: &SeriesControl,
) -> Result<KernelEvaluation> {
    let geom = pair_geometry(z, w, params);
    kernel_km_terms(m, &geom, params, ctrl, direct_ladder(m.get(), params))
}

/// `sigma_{k,l} = sum_j Gamma(B-k+i alpha_j/2) Gamma(B-l-i alpha_j/2) t^j`.
pub fn sigma_kl(
    k: usize,
    l: usize,
    z: &AnnulusPoint,
    w: &AnnulusPoint,
    params: &AnnulusParams,
    ctrl: &SeriesControl,
) -> Result<Complex64> {
    let b = params.b();
    let p = k.max(l);
    let c = b - p as f64;
    if c <= 0.0 && c == c.floor() && params.integer_b().is_some() {
        return Err(Error::Pole(c));
    }
    let geom = pair_geometry(z, w, params);
    if resummation_applies(c, params.ln_r()) {
        let weight = &rising_poly(c, p - k, 1.0) * &rising_poly(c, p - l, -1.0);
        return Ok(resummed_gamma_series(c, &weight, &geom, 0.0, ctrl, "sigma series")?.value);
    }
    let lpi = params.ln_r() / PI;
    let (plus, minus) = gamma_series_decay(&geom, c, (2 * p - k - l) as f64);
    let sum = sum_bilateral(series_start(params), -b, plus, Some(minus), ctrl, "sigma series", |j| {
        let y = (j as f64 + b) * lpi;
        let a = rising_ladder(p, b, y);
        let modulus = (log_gamma_abs_sq(c, y)? + j as f64 * geom.ln_abs_t).exp();
        Ok(Complex64::from_polar(modulus, j as f64 * geom.arg_t) * a[k] * a[l].conj())
    })?;
    Ok(sum.value)
}

/// `sigma_{k,l}` for integer `B` through the elementary product for `|Gamma(n + i y)|^2`.
pub fn sigma_kl_product(
    k: usize,
    l: usize,
    z: &AnnulusPoint,
    w: &AnnulusPoint,
    params: &AnnulusParams,
    ctrl: &SeriesControl,
) -> Result<Complex64> {
    let bi = require_integer_b(params, "the product formula")?;
    let p = k.max(l);
    if p as u32 >= bi {
        return Err(Error::InvalidParameter(format!("B - max(k, l) must be positive (B = {bi}, k = {k}, l = {l})")));
    }
    let b = f64::from(bi);
    let c = b - p as f64;
    let geom = pair_geometry(z, w, params);
    let ln_r = Dd::new(params.r()).ln();
    let lpi = ln_r / Dd::PI;
    // Gamma(c + iy) Gamma(c - iy) = Gamma(c)^2 (2 ln R) lambda(n) prod_{q<c} (1 + y^2/q^2), y = n ln R/pi.
    let mut poly = vec![DdComplex::one()];
    for r in 0..(p - k) {
        poly = poly_mul_dd(&poly, &linear_dd(c + r as f64, Dd::new(1.0)));
    }
    for r in 0..(p - l) {
        poly = poly_mul_dd(&poly, &linear_dd(c + r as f64, Dd::new(-1.0)));
    }
    let (plus, minus) = gamma_series_decay(&geom, c, (2 * p - k - l) as f64);
    // After the shift n = j + B the series reads t^{-B} sum_n |Gamma(B-p+i n ln R/pi)|^2 ... t^n.
    let sum = sum_powers_dd(dd_t(z, w, params), plus, minus, ctrl, "sigma product series", |n| {
        let y = lpi * n as f64;
        let y2 = y * y;
        let pair =
            (1..bi - p as u32).fold(ln_r * 2.0 * lambert_dd(n, ln_r), |acc, q| acc * (y2 / f64::from(q * q) + 1.0));
        Ok(poly_eval_dd(&poly, y).scale(pair))
    })?;
    let g = gamma_real(c)?;
    Ok(sum.value * (g * g) * geom.t_pow(-b))
}

/// The level-`m` kernel assembled from [`sigma_kl_product`] (integer `B`).
pub fn kernel_km_product(
    m: LevelIndex,
    z: &AnnulusPoint,
    w: &AnnulusPoint,
    params: &AnnulusParams,
    ctrl: &SeriesControl,
) -> Result<KernelEvaluation> {
    require_integer_b(params, "the product formula")?;
    let m = m.get();
    let geom = pair_geometry(z, w, params);
    let coeffs = double_sum_coefficients(m, params.b());
    let mut value = Complex64::new(0.0, 0.0);
    for k in 0..=m {
        for l in 0..=(m - k) {
            let s = sigma_kl_product(k, l, z, w, params, ctrl)?;
            value += s * geom.v.conj().powu(k as u32) * geom.v.powu(l as u32) * coeffs[k][l];
        }
    }
    let value = value * log_prefactor(m, params)?.exp();
    let terms = (m + 1) * (m + 2) / 2;
    Ok(KernelEvaluation {
        value,
        path: KernelPath::ProductFormula,
        terms_used: terms,
        tail_bound: ctrl.tolerance * value.norm(),
    })
}

/// `K_0` from `(2 pi)^{2B-3} / (Gamma(2B-1) R^B (ln R)^{2B-1}) sum_j |Gamma(B + i (ln R/pi)(j+B))|^2 t^j`.
pub fn kernel_k0_closed(
    z: &AnnulusPoint,
    w: &AnnulusPoint,
    params: &AnnulusParams,
    ctrl: &SeriesControl,
) -> Result<KernelEvaluation> {
    let b = params.b();
    let geom = pair_geometry(z, w, params);
    let (lg, _) = log_gamma_real(2.0 * b - 1.0)?;
    let ln_pre = (2.0 * b - 3.0) * (2.0 * PI).ln() - lg - b * params.ln_r() - (2.0 * b - 1.0) * params.ln_r().ln();
    if resummation_applies(b, params.ln_r()) {
        let sum = resummed_gamma_series(b, &Poly::one(), &geom, ln_pre, ctrl, "K0 series")?;
        return Ok(KernelEvaluation::from_sum(sum, KernelPath::ClosedForm));
    }
    let lpi = params.ln_r() / PI;
    let (plus, minus) = gamma_series_decay(&geom, b, 0.0);
    let sum = sum_bilateral(series_start(params), -b, plus, Some(minus), ctrl, "K0 series", |j| {
        let modulus = (ln_pre + log_gamma_abs_sq(b, (j as f64 + b) * lpi)? + j as f64 * geom.ln_abs_t).exp();
        Ok(Complex64::from_polar(modulus, j as f64 * geom.arg_t))
    })?;
    Ok(KernelEvaluation::from_sum(sum, KernelPath::ClosedForm))
}

/// The `B = 1` kernel `(1/(pi z conj(w))) sum_j j/(1 - R^{-2j}) (z conj(w)/R^2)^j`,
/// with the `j = 0` term equal to `1/(2 ln R)`.
pub fn kernel_k0_b1(z: &AnnulusPoint, w: &AnnulusPoint, r: f64, ctrl: &SeriesControl) -> Result<Complex64> {
    let params = AnnulusParams::new(r, 1.0)?;
    let geom = pair_geometry(z, w, &params);
    let ln_r = Dd::new(r).ln();
    let (qp, qm) = geom.decay_ratios();
    // j/(1 - R^{-2j}) (zw/R^2)^j = lambda(j) t^j.
    let sum =
        sum_powers_dd(dd_t(z, w, &params), Decay::new(qp, 1.0), Decay::new(qm, 1.0), ctrl, "B = 1 kernel", |j| {
            Ok(DdComplex::one().scale(lambert_dd(j, ln_r)))
        })?;
    let zw = z.z() * w.z().conj();
    Ok(sum.value / (PI * zw))
}

/// `K_0` for integer `B`:
/// `(2 pi)^{2B-2} Gamma(B)^2 / (pi Gamma(2B-1) (z conj(w))^B (ln R)^{2B-2})
///  sum_j j/(R^{2j}-1) prod_{q<B} (1 + (j ln R)^2/(pi q)^2) (z conj(w))^j`.
pub fn kernel_k0_integer_product(
    z: &AnnulusPoint,
    w: &AnnulusPoint,
    params: &AnnulusParams,
    ctrl: &SeriesControl,
) -> Result<KernelEvaluation> {
    let bi = require_integer_b(params, "the integer product formula")?;
    let b = f64::from(bi);
    let ln_r = params.ln_r();
    let geom = pair_geometry(z, w, params);
    let (lg_b, _) = log_gamma_real(b)?;
    let (lg_2b, _) = log_gamma_real(2.0 * b - 1.0)?;
    let ln_pre = (2.0 * b - 2.0) * (2.0 * PI).ln() + 2.0 * lg_b - PI.ln() - lg_2b - (2.0 * b - 2.0) * ln_r.ln();
    let (qp, qm) = geom.decay_ratios();
    let degree = 2.0 * b - 1.0;
    let ln_r_dd = Dd::new(params.r()).ln();
    let lpi = ln_r_dd / Dd::PI;
    let decay = (Decay::new(qp, degree), Decay::new(qm, degree));
    // j/(R^{2j}-1) (z w)^j = lambda(j) t^j.
    let sum = sum_powers_dd(dd_t(z, w, params), decay.0, decay.1, ctrl, "K0 product series", |j| {
        let y2 = (lpi * j as f64) * (lpi * j as f64);
        let poly = (1..bi).fold(Dd::new(1.0), |acc, q| acc * (y2 / f64::from(q * q) + 1.0));
        Ok(DdComplex::one().scale(lambert_dd(j, ln_r_dd) * poly))
    })?;
    let zw_pow_b = Complex64::from_polar(((geom.ln_abs_t + ln_r) * b).exp(), geom.arg_t * b);
    let value = sum.value * ln_pre.exp() / zw_pow_b;
    let scale = ln_pre.exp() / zw_pow_b.norm();
    Ok(KernelEvaluation {
        value,
        path: KernelPath::ProductFormula,
        terms_used: sum.terms,
        tail_bound: sum.tail_bound * scale,
    })
}

/// Limit of `K_0` as `R -> infinity`:
/// `2^{2B-2} / (pi Gamma(2B-1)) sum_{j>=1} j^{2B-1} / (z conj(w))^{j+B}`, integer `B`.
pub fn kernel_limit_r_inf(z: Complex64, w: Complex64, b: u32, ctrl: &SeriesControl) -> Result<Complex64> {
    if b == 0 {
        return Err(Error::InvalidParameter("B must be a positive integer".into()));
    }
    let zw = z * w.conj();
    let ln_abs = zw.norm().ln();
    let arg = zw.arg();
    let q = (-ln_abs).exp();
    let bf = f64::from(b);
    let degree = 2.0 * bf - 1.0;
    let sum = sum_bilateral(1, 0.0, Decay::new(q, degree), None, ctrl, "R -> infinity limit", |j| {
        let jf = j as f64;
        let modulus = (degree * jf.ln() - (jf + bf) * ln_abs).exp();
        Ok(Complex64::from_polar(modulus, -(jf + bf) * arg))
    })?;
    let (lg, _) = log_gamma_real(2.0 * bf - 1.0)?;
    Ok(sum.value * ((2.0 * bf - 2.0) * 2f64.ln() - lg).exp() / PI)
}

/// `P_n^{(-B + s i y, -B - s i y)}(x)` as a polynomial in `y`.
fn jacobi_weight_poly(n: usize, b: f64, s: f64, x: Complex64) -> Poly {
    let lo = (x - 1.0) * 0.5;
    let hi = (x + 1.0) * 0.5;
    let mut out = Poly::constant(Complex64::new(0.0, 0.0));
    for l in 0..=n {
        // binom(n + alpha, n - l) binom(n + beta, l)
        let first = rising_poly(-b + (l + 1) as f64, n - l, s);
        let second = rising_poly(-b + (n - l + 1) as f64, l, -s);
        let scale = lo.powu(l as u32) * hi.powu((n - l) as u32) / (factorial(n - l) * factorial(l));
        out = &out + &(&first * &second).scale(scale);
    }
    out
}

/// The single-sum Jacobi product form
/// `gamma_m sum_j t^j |Gamma(B-m+mu_j)|^2 P_m^{(-B-mu_j,-B+mu_j)}(iX) P_m^{(-B+mu_j,-B-mu_j)}(-iY)`,
/// `gamma_m = (2 pi)^{2B-3} m! (2B-2m-1) / (R^B (ln R)^{2B-1} Gamma(2B-m))`.
pub fn kernel_jacobi_product(
    m: LevelIndex,
    z: &AnnulusPoint,
    w: &AnnulusPoint,
    params: &AnnulusParams,
    ctrl: &SeriesControl,
) -> Result<Complex64> {
    let m = m.get();
    let b = params.b();
    let c = b - m as f64;
    let geom = pair_geometry(z, w, params);
    let ln_pre = log_prefactor(m, params)? + factorial(m).ln();
    let ix = Complex64::new(0.0, geom.x);
    let iy = Complex64::new(0.0, geom.y);
    if resummation_applies(c, params.ln_r()) {
        let weight = &jacobi_weight_poly(m, b, -1.0, ix) * &jacobi_weight_poly(m, b, 1.0, -iy);
        return Ok(resummed_gamma_series(c, &weight, &geom, ln_pre, ctrl, "Jacobi product series")?.value);
    }
    let (plus, minus) = gamma_series_decay(&geom, c, 2.0 * m as f64);
    let sum = sum_bilateral(series_start(params), -b, plus, Some(minus), ctrl, "Jacobi product series", |j| {
        let mu = geom.mu(j);
        let first = JacobiParams::new(-b - mu, -b + mu, m)?;
        let second = JacobiParams::new(-b + mu, -b - mu, m)?;
        let pp = jacobi_poly(&first, ix) * jacobi_poly(&second, -iy);
        let modulus = (ln_pre + log_gamma_abs_sq(c, mu.im)? + j as f64 * geom.ln_abs_t).exp();
        Ok(Complex64::from_polar(modulus, j as f64 * geom.arg_t) * pp)
    })?;
    Ok(sum.value)
}

/// `|K_m(R/z, R/w) - t^{2B} K_m(z, w)| / |K_m(z, w)|` with `t = z conj(w)/R`, integer `B`.
pub fn inversion_covariance_residual(
    m: LevelIndex,
    z: &AnnulusPoint,
    w: &AnnulusPoint,
    params: &AnnulusParams,
    ctrl: &SeriesControl,
) -> Result<f64> {
    let b = require_integer_b(params, "the inversion rule")?;
    let zi = invert_point(z, params)?;
    let wi = invert_point(w, params)?;
    let direct = kernel_km(m, z, w, params, ctrl)?.value;
    let inverted = kernel_km(m, &zi, &wi, params, ctrl)?.value;
    let geom = pair_geometry(z, w, params);
    let factor = geom.t.powu(2 * b);
    Ok((inverted - factor * direct).norm() / direct.norm())
}
