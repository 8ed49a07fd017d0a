//! Landau levels, the orthogonal eigenbasis and the differential operators
//! acting on it.
//!
//! The level-`m` basis is `phi_j(z) = z^j R_m^{(-alpha(j,B), 1-B)}(cot zeta)`.
//! With the Routh/Jacobi convention of [`crate::special::romanovski`] this is
//! the polynomial annihilated by `L_B - lambda_{B,m}` and orthogonal for the
//! measure `omega_R^{2B-2} dmu`; flipping the sign of `alpha` breaks both.
//!
//! The operator `Delta_B = -omega^2 d_{z zbar} - 2B omega (d_z omega) d_{zbar}`
//! reduces on `z^j f(xi)` to `-(1/4) z^j L_B f`, so its eigenvalue on level
//! `m` is `-lambda_{B,m}/4`. [`landau_laplacian_apply`] applies `-4 Delta_B`,
//! whose eigenvalues are the Landau levels `lambda_{B,m} = -m(2B-m-1)`.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{poincare_density, poincare_density_dz, xi_coordinate, AnnulusParams, AnnulusPoint};
use crate::special::gamma::{factorial, log_gamma_abs_sq, log_gamma_real};
use crate::special::romanovski::{routh_coefficients, routh_romanovski};

/// Minimum value of `2(B - m) - 1` for a level to have finite norms.
pub const NORM_MARGIN: f64 = 1e-6;

/// Default half-width of the basis index window.
pub const DEFAULT_WINDOW: i64 = 64;

/// An admissible Landau level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LevelIndex(usize);

impl LevelIndex {
    pub fn new(m: usize, params: &AnnulusParams) -> Result<Self> {
        let b = params.b();
        let top = (b - 0.5).floor();
        if m as f64 > top || 2.0 * (b - m as f64) - 1.0 <= NORM_MARGIN {
            return Err(Error::InadmissibleLevel { m, b });
        }
        Ok(Self(m))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

/// A basis index `j` inside a window `|j| <= window`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex(i64);

impl BasisIndex {
    pub fn new(j: i64) -> Result<Self> {
        Self::with_window(j, DEFAULT_WINDOW)
    }

    pub fn with_window(j: i64, window: i64) -> Result<Self> {
        if j.abs() > window {
            return Err(Error::InvalidParameter(format!("basis index {j} outside window {window}")));
        }
        Ok(Self(j))
    }

    pub fn get(self) -> i64 {
        self.0
    }
}

/// `lambda_{B,m} = -m (2B - m - 1)`.
pub fn landau_level_eigenvalue(m: LevelIndex, params: &AnnulusParams) -> f64 {
    let m = m.0 as f64;
    // `+ 0.0` turns the `-0.0` of level 0 into `0.0`.
    -m * (2.0 * params.b() - m - 1.0) + 0.0
}

/// Levels `0..=floor(B - 1/2)` with finite norms.
pub fn admissible_levels(params: &AnnulusParams) -> Vec<LevelIndex> {
    let top = (params.b() - 0.5).floor() as usize;
    (0..=top).filter_map(|m| LevelIndex::new(m, params).ok()).collect()
}

/// Routh parameter `a` of the level polynomial attached to `z^j`.
pub(crate) fn routh_a(j: i64, params: &AnnulusParams) -> f64 {
    -params.alpha(j)
}

/// The radial polynomial `R_m^{(-alpha(j,B), 1-B)}(xi)`.
pub fn basis_radial(j: i64, m: LevelIndex, xi: f64, params: &AnnulusParams) -> Result<f64> {
    Ok(routh_romanovski(m.0, routh_a(j, params), 1.0 - params.b(), xi)?.value)
}

pub fn basis_phi(j: BasisIndex, m: LevelIndex, z: &AnnulusPoint, params: &AnnulusParams) -> Result<Complex64> {
    let j = j.0;
    let radial = basis_radial(j, m, xi_coordinate(z, params), params)?;
    let power = Complex64::from_polar((j as f64 * z.ln_modulus()).exp(), j as f64 * z.arg());
    Ok(power * radial)
}

/// `ln ||phi_j||^2` from the closed form
/// `2^{3-2(B-m)} R^B (ln R)^{2B-1} pi^{3-2B} m! Gamma(2B-m) / (2(B-m)-1) * R^j / |Gamma(B-m+i alpha/2)|^2`.
pub fn basis_log_norm_sq(j: i64, m: LevelIndex, params: &AnnulusParams) -> Result<f64> {
    let b = params.b();
    let mf = m.0 as f64;
    let ln_r = params.ln_r();
    let (lg, _) = log_gamma_real(2.0 * b - mf)?;
    let pair = log_gamma_abs_sq(b - mf, 0.5 * params.alpha(j))?;
    Ok((3.0 - 2.0 * (b - mf)) * LN_2 + b * ln_r + (2.0 * b - 1.0) * ln_r.ln() - (2.0 * b - 3.0) * PI.ln()
        + factorial(m.0).ln()
        + lg
        - (2.0 * (b - mf) - 1.0).ln()
        + j as f64 * ln_r
        - pair)
}

pub fn basis_norm_sq(j: BasisIndex, m: LevelIndex, params: &AnnulusParams) -> Result<f64> {
    basis_log_norm_sq(j.0, m, params).map(f64::exp)
}

/// `Phi_j = phi_j / ||phi_j||`, assembled in log space.
pub fn orthonormal_phi(j: BasisIndex, m: LevelIndex, z: &AnnulusPoint, params: &AnnulusParams) -> Result<Complex64> {
    orthonormal_phi_raw(j.0, m, z, params)
}

pub(crate) fn orthonormal_phi_raw(
    j: i64,
    m: LevelIndex,
    z: &AnnulusPoint,
    params: &AnnulusParams,
) -> Result<Complex64> {
    let radial = basis_radial(j, m, xi_coordinate(z, params), params)?;
    let log_mod = j as f64 * z.ln_modulus() - 0.5 * basis_log_norm_sq(j, m, params)?;
    Ok(Complex64::from_polar(log_mod.exp(), j as f64 * z.arg()) * radial)
}

/// `L_B R_m - lambda_{B,m} R_m` at `xi`, with
/// `L_B = (1+xi^2) d^2 + 2[(1-B) xi - (j+B) ln R/pi] d` and exact polynomial derivatives.
pub fn sturm_liouville_apply(m: LevelIndex, j: i64, xi: f64, params: &AnnulusParams) -> Result<f64> {
    let b = params.b();
    let coeffs = routh_coefficients(m.0, routh_a(j, params), 1.0 - b)?;
    let eval = |c: &[f64]| c.iter().rev().fold(0.0, |acc, &a| acc * xi + a);
    let d1: Vec<f64> = coeffs.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect();
    let d2: Vec<f64> = d1.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect();
    let drift = 2.0 * ((1.0 - b) * xi - (j as f64 + b) * params.ln_r() / PI);
    let value = eval(&coeffs);
    Ok((1.0 + xi * xi) * eval(&d2) + drift * eval(&d1) - landau_level_eigenvalue(m, params) * value)
}

/// A pure point-evaluable function; it is sampled concurrently by stencils.
pub type PointFn<'a> = dyn Fn(Complex64) -> Complex64 + Sync + 'a;

/// Default finite-difference step `1e-3 * distance to the boundary`.
pub fn default_step(z: &AnnulusPoint, params: &AnnulusParams) -> f64 {
    1e-3 * z.boundary_distance(params)
}

fn check_reach(z: &AnnulusPoint, params: &AnnulusParams, required: f64) -> Result<()> {
    let distance = z.boundary_distance(params);
    if distance <= required {
        return Err(Error::BoundaryProximity { distance, required });
    }
    Ok(())
}

// Fourth-order central stencils.
fn d1(f: &PointFn, z: Complex64, dir: Complex64, h: f64) -> Complex64 {
    let s = dir * h;
    (f(z - s * 2.0) - f(z + s * 2.0) + (f(z + s) - f(z - s)) * 8.0) / (12.0 * h)
}

fn d2(f: &PointFn, z: Complex64, fz: Complex64, dir: Complex64, h: f64) -> Complex64 {
    let s = dir * h;
    (-(f(z - s * 2.0) + f(z + s * 2.0)) + (f(z + s) + f(z - s)) * 16.0 - fz * 30.0) / (12.0 * h * h)
}

fn dzbar(f: &PointFn, z: Complex64, h: f64) -> Complex64 {
    let i = Complex64::i();
    (d1(f, z, Complex64::new(1.0, 0.0), h) + i * d1(f, z, i, h)) * 0.5
}

/// `Delta_B f(z)` by fourth-order finite differences; `d_z omega` is exact.
pub fn invariant_laplacian_apply(
    f: &PointFn,
    z: &AnnulusPoint,
    params: &AnnulusParams,
    step: f64,
) -> Result<Complex64> {
    check_reach(z, params, 4.0 * step)?;
    let w = z.z();
    let fz = f(w);
    let lap = d2(f, w, fz, Complex64::new(1.0, 0.0), step) + d2(f, w, fz, Complex64::i(), step);
    let omega = poincare_density(z, params);
    let domega = poincare_density_dz(z, params);
    Ok(-(omega * omega) * lap * 0.25 - domega * (2.0 * params.b() * omega) * dzbar(f, w, step))
}

/// `-4 Delta_B f`, normalized so that level `m` has eigenvalue `lambda_{B,m}`.
pub fn landau_laplacian_apply(f: &PointFn, z: &AnnulusPoint, params: &AnnulusParams, step: f64) -> Result<Complex64> {
    invariant_laplacian_apply(f, z, params, step).map(|v| v * -4.0)
}

/// Eigenvalue of [`invariant_laplacian_apply`] on level `m`: `-lambda_{B,m}/4`.
pub fn invariant_laplacian_eigenvalue(m: LevelIndex, params: &AnnulusParams) -> f64 {
    -0.25 * landau_level_eigenvalue(m, params)
}

fn density_at(z: Complex64, params: &AnnulusParams) -> f64 {
    let ln_mod = z.norm().ln();
    params.ln_r() / PI * ln_mod.exp() * (PI * ln_mod / params.ln_r()).sin()
}

/// Ratio between the steps of consecutive nesting levels.
const CR_STAGGER: f64 = 0.61;

/// `(omega^2 d_{zbar})^order f(z)` by nested fourth-order stencils, the step
/// shrinking by a fixed factor at each nesting level.
pub fn cr_power_apply(
    f: &PointFn,
    order: usize,
    z: &AnnulusPoint,
    params: &AnnulusParams,
    step: f64,
) -> Result<Complex64> {
    if order == 0 || order > 3 {
        return Err(Error::InvalidParameter(format!("Cauchy-Riemann power must be 1..=3, got {order}")));
    }
    let reach: f64 = (0..order).map(|k| 2.0 * step * CR_STAGGER.powi(k as i32)).sum();
    check_reach(z, params, 2.0 * reach)?;
    Ok(cr_nested(f, order, z.z(), params, step))
}

fn cr_nested(f: &PointFn, order: usize, z: Complex64, params: &AnnulusParams, h: f64) -> Complex64 {
    let omega = density_at(z, params);
    if order == 1 {
        return dzbar(f, z, h) * (omega * omega);
    }
    let inner = |u: Complex64| cr_nested(f, order - 1, u, params, h * CR_STAGGER);
    dzbar(&inner, z, h) * (omega * omega)
}

/// Default step for [`cr_power_apply`]: `1e-2 * distance to the boundary`.
pub fn default_cr_step(z: &AnnulusPoint, params: &AnnulusParams) -> f64 {
    1e-2 * z.boundary_distance(params)
}

/// Natural magnitude of `(omega^2 d_{zbar})^order f` at `z`: `|f| (omega^2/|z|)^order`.
pub fn cr_scale(value: Complex64, order: usize, z: &AnnulusPoint, params: &AnnulusParams) -> f64 {
    let omega = poincare_density(z, params);
    value.norm() * (omega * omega / z.modulus()).powi(order as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(r: f64, b: f64) -> AnnulusParams {
        AnnulusParams::new(r, b).unwrap()
    }

    fn level(m: usize, p: &AnnulusParams) -> LevelIndex {
        LevelIndex::new(m, p).unwrap()
    }

    #[test]
    fn eigenvalues() {
        let p = params(4.0, 3.0);
        assert_eq!(landau_level_eigenvalue(level(0, &p), &p), 0.0);
        assert_eq!(landau_level_eigenvalue(level(1, &p), &p), -4.0);
        assert_eq!(landau_level_eigenvalue(level(2, &p), &p), -6.0);
        for b in [1.0, 2.0, 3.0, 5.25] {
            let p = params(4.0, b);
            let lv: Vec<f64> = admissible_levels(&p).iter().map(|&m| landau_level_eigenvalue(m, &p)).collect();
            assert!(lv.windows(2).all(|w| w[1] < w[0]), "B = {b}: {lv:?}");
        }
    }

    #[test]
    fn level_ranges() {
        let ms = |b: f64| admissible_levels(&params(4.0, b)).iter().map(|m| m.get()).collect::<Vec<_>>();
        assert_eq!(ms(1.0), vec![0]);
        assert_eq!(ms(3.0), vec![0, 1, 2]);
        assert_eq!(ms(2.5), vec![0, 1]);
        assert_eq!(ms(0.6), vec![0]);
        assert!(matches!(LevelIndex::new(2, &params(4.0, 2.5)), Err(Error::InadmissibleLevel { .. })));
        assert!(LevelIndex::new(3, &params(4.0, 3.0)).is_err());
    }

    #[test]
    fn basis_examples() {
        let p = params(4.0, 3.0);
        let z = p.point(Complex64::from_polar(1.8, 0.9)).unwrap();
        let j = BasisIndex::new(3).unwrap();
        let m0 = level(0, &p);
        let v = basis_phi(j, m0, &z, &p).unwrap();
        assert!((v - z.z().powu(3)).norm() < 1e-14 * v.norm());
        assert_eq!(basis_phi(BasisIndex::new(0).unwrap(), m0, &z, &p).unwrap(), Complex64::new(1.0, 0.0));
        let theta = 0.77;
        let rotated = p.point(z.z() * Complex64::from_polar(1.0, theta)).unwrap();
        let m2 = level(2, &p);
        let a = basis_phi(j, m2, &rotated, &p).unwrap();
        let b = basis_phi(j, m2, &z, &p).unwrap() * Complex64::from_polar(1.0, 3.0 * theta);
        assert!((a - b).norm() < 1e-13 * a.norm());
        assert!(BasisIndex::new(65).is_err());
    }

    #[test]
    fn norm_for_unit_weight() {
        // B = 1, m = 0: ||z^j||^2 = pi (R^{2j+2} - 1) / (j + 1).
        let p = params(3.0, 1.0);
        let m0 = level(0, &p);
        for j in [-4i64, -2, 0, 1, 5] {
            let want = PI * (p.r().powi(2 * j as i32 + 2) - 1.0) / (j as f64 + 1.0);
            let got = basis_norm_sq(BasisIndex::new(j).unwrap(), m0, &p).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-12);
        }
        let got = basis_norm_sq(BasisIndex::new(-1).unwrap(), m0, &p).unwrap();
        assert_relative_eq!(got, 2.0 * PI * p.ln_r(), max_relative = 1e-12);
    }

    #[test]
    fn norm_ratio_asymptotics() {
        // ||phi_{j+1}||^2/||phi_j||^2 -> R * R for large positive j.
        let p = params(4.0, 3.0);
        let m1 = level(1, &p);
        let ratio = (basis_log_norm_sq(31, m1, &p).unwrap() - basis_log_norm_sq(30, m1, &p).unwrap()).exp();
        let limit = p.r() * p.r();
        assert!((ratio / limit - 1.0).abs() < 0.2, "{ratio}");
        assert!(ratio < limit);
    }

    #[test]
    fn orthonormal_scaling() {
        let p = params(4.0, 3.0);
        let z = p.point(Complex64::from_polar(2.3, -0.4)).unwrap();
        let m = level(1, &p);
        let j = BasisIndex::new(-2).unwrap();
        let lhs = orthonormal_phi(j, m, &z, &p).unwrap().norm_sqr() * basis_norm_sq(j, m, &p).unwrap();
        assert_relative_eq!(lhs, basis_phi(j, m, &z, &p).unwrap().norm_sqr(), max_relative = 1e-13);
    }

    #[test]
    fn sturm_liouville_residuals() {
        let p = params(4.0, 3.0);
        assert_eq!(sturm_liouville_apply(level(0, &p), 2, 0.4, &p).unwrap(), 0.0);
        for &j in &[-5i64, 0, 3] {
            for xi in [-2.0, 0.0, 2.0] {
                assert!(sturm_liouville_apply(level(1, &p), j, xi, &p).unwrap().abs() < 1e-10);
            }
        }
        for xi in [-1.3, 0.2, 0.9, 3.1] {
            assert!(sturm_liouville_apply(level(2, &p), 4, xi, &p).unwrap().abs() < 1e-9);
        }
        let q = params(6.0, 2.75);
        assert!(sturm_liouville_apply(level(2, &q), -3, 0.7, &q).unwrap().abs() < 1e-9);
    }

    #[test]
    fn opposite_alpha_is_not_an_eigenfunction() {
        // Pins the sign convention of the basis polynomial.
        let p = params(4.0, 3.0);
        let m = level(1, &p);
        let j = 1;
        let c = routh_coefficients(1, p.alpha(j), 1.0 - p.b()).unwrap();
        let xi = 0.5;
        let drift = 2.0 * ((1.0 - p.b()) * xi - (j as f64 + p.b()) * p.ln_r() / PI);
        let resid = drift * c[1] - landau_level_eigenvalue(m, &p) * (c[0] + c[1] * xi);
        assert!(resid.abs() > 1.0);
    }

    #[test]
    fn laplacian_on_holomorphic_and_constant() {
        let p = params(4.0, 3.0);
        let z = p.point(Complex64::from_polar(1.9, 0.6)).unwrap();
        let h = default_step(&z, &p);
        let constant = |_: Complex64| Complex64::new(2.5, -1.0);
        assert!(invariant_laplacian_apply(&constant, &z, &p, h).unwrap().norm() < 1e-10);
        let power = |u: Complex64| u.powi(-3);
        let v = invariant_laplacian_apply(&power, &z, &p, h).unwrap();
        assert!(v.norm() < 1e-6 * z.z().powi(-3).norm());
    }

    #[test]
    fn laplacian_eigenfunctions() {
        let p = params(4.0, 3.0);
        let z = p.point(Complex64::from_polar(2.2, 1.1)).unwrap();
        let h = default_step(&z, &p);
        for m in admissible_levels(&p) {
            let j = BasisIndex::new(1).unwrap();
            let f = |u: Complex64| basis_phi(j, m, &p.point(u).unwrap(), &p).unwrap();
            let phi = f(z.z());
            let wl = invariant_laplacian_apply(&f, &z, &p, h).unwrap();
            let want = phi * invariant_laplacian_eigenvalue(m, &p);
            assert!((wl - want).norm() <= 1e-4 * phi.norm(), "m = {}", m.get());
            let landau = landau_laplacian_apply(&f, &z, &p, h).unwrap();
            assert!((landau - phi * landau_level_eigenvalue(m, &p)).norm() <= 1e-4 * phi.norm());
        }
    }

    #[test]
    fn polyanalyticity() {
        let p = params(4.0, 3.0);
        let z = p.point(Complex64::from_polar(2.1, 0.3)).unwrap();
        let h = default_cr_step(&z, &p);
        let holo = |u: Complex64| u.powi(2);
        let v = cr_power_apply(&holo, 1, &z, &p, h).unwrap();
        assert!(v.norm() < 1e-8 * cr_scale(z.z().powi(2), 1, &z, &p));
        for m in admissible_levels(&p).into_iter().skip(1) {
            let j = BasisIndex::new(-2).unwrap();
            let f = |u: Complex64| basis_phi(j, m, &p.point(u).unwrap(), &p).unwrap();
            let phi = f(z.z());
            let kill = cr_power_apply(&f, m.get() + 1, &z, &p, h).unwrap();
            let keep = cr_power_apply(&f, m.get(), &z, &p, h).unwrap();
            let scale = cr_scale(phi, m.get() + 1, &z, &p);
            assert!(kill.norm() <= 1e-3 * scale, "m = {}: {} vs {}", m.get(), kill.norm(), scale);
            assert!(keep.norm() >= 10.0 * kill.norm());
        }
        assert!(cr_power_apply(&holo, 4, &z, &p, h).is_err());
    }

    #[test]
    fn stencil_near_boundary_rejected() {
        let p = params(4.0, 3.0);
        let z = p.point(Complex64::new(1.001, 0.0)).unwrap();
        let f = |u: Complex64| u;
        assert!(matches!(invariant_laplacian_apply(&f, &z, &p, 0.01), Err(Error::BoundaryProximity { .. })));
    }
}
