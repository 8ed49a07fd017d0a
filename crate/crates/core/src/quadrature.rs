//! Tensor quadrature on the annulus against `omega_R^{2B-2} dmu`.
//!
//! With `|z| = R^{zeta/pi}` the measure becomes
//! `(ln R/pi)^{2B-1} |z|^{2B} sin(zeta)^{2B-2} dzeta dtheta`. The angular rule is
//! the equispaced trapezoid, exact for Fourier modes below `n_angular`; the
//! radial rule is Gauss-Legendre in `u` on `(0, 1)` with `zeta = pi (3u^2 - 2u^3)`.
//! At non-integer `B` the integrands behave like `zeta^beta` at the circles
//! (`beta = 2B - 2 - m - m'` for levels `m`, `m'`); the substitution turns
//! `zeta^{-1/2}` into an analytic function of `u` and tames the other
//! exponents, and is harmless for the analytic integrands of integer `B`. Rings are summed in parallel and
//! reduced in ring order, so both execution modes give identical bits.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AnnulusParams, AnnulusPoint};
use crate::par::{try_map_indexed, Mode};
use crate::special::CompensatedSum;

/// Largest admissible change of an integral under doubling of `n_radial`,
/// relative to the integral of `|f|`.
pub const SELF_CONVERGENCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub n_angular: usize,
    pub n_radial: usize,
    /// `2B - 2`.
    pub weight_exponent: f64,
}

impl QuadratureSpec {
    pub fn new(n_angular: usize, n_radial: usize, params: &AnnulusParams) -> Result<Self> {
        if n_angular < 2 || !n_angular.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("n_angular must be even and positive, got {n_angular}")));
        }
        if n_radial < 32 {
            return Err(Error::InvalidParameter(format!("n_radial must be at least 32, got {n_radial}")));
        }
        if params.b() < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "the default rule needs B >= 1 (endpoint-singular weight for B = {})",
                params.b()
            )));
        }
        Ok(Self { n_angular, n_radial, weight_exponent: 2.0 * params.b() - 2.0 })
    }

    /// `n_angular = 128`, `n_radial = 96`.
    pub fn default_for(params: &AnnulusParams) -> Result<Self> {
        Self::new(128, 96, params)
    }

    /// Whether Fourier modes up to `max_mode` are integrated exactly.
    pub fn resolves_mode(&self, max_mode: usize) -> bool {
        self.n_angular >= 2 * max_mode + 2
    }

    fn doubled(&self) -> Self {
        Self { n_radial: 2 * self.n_radial, ..*self }
    }
}

/// Nodes and weights of one tensor rule, ring by ring.
#[derive(Debug, Clone)]
pub struct AnnulusRule {
    rings: Vec<Ring>,
}

#[derive(Debug, Clone)]
struct Ring {
    points: Vec<AnnulusPoint>,
    weight: f64,
}

impl AnnulusRule {
    pub fn new(spec: &QuadratureSpec, params: &AnnulusParams) -> Result<Self> {
        let n = NonZeroUsize::new(spec.n_radial).ok_or_else(|| Error::InvalidParameter("empty radial rule".into()))?;
        let gl = GaussLegendre::new(n);
        let lpi = params.ln_r() / PI;
        let b = params.b();
        let d_theta = 2.0 * PI / spec.n_angular as f64;
        let rings = gl
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| {
                let u = 0.5 * (x + 1.0);
                let zeta = PI * u * u * (3.0 - 2.0 * u);
                let dzeta = 6.0 * PI * u * (1.0 - u);
                let jac = dzeta
                    * lpi.powf(2.0 * b - 1.0)
                    * (2.0 * b * zeta * lpi).exp()
                    * zeta.sin().powf(spec.weight_exponent);
                let points = (0..spec.n_angular)
                    .map(|k| AnnulusPoint::from_polar_zeta(zeta, k as f64 * d_theta, params))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Ring { points, weight: 0.5 * w * jac * d_theta })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rings })
    }

    pub fn len(&self) -> usize {
        self.rings.iter().map(|r| r.points.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Visits every node in radial-major order with its weight.
    pub fn nodes(&self) -> impl Iterator<Item = (&AnnulusPoint, f64)> {
        self.rings.iter().flat_map(|r| r.points.iter().map(move |p| (p, r.weight)))
    }

    /// `(integral of f, integral of |f|)`.
    pub fn integrate<F>(&self, f: F, mode: Mode) -> Result<(Complex64, f64)>
    where
        F: Fn(&AnnulusPoint) -> Result<Complex64> + Sync,
    {
        let per_ring = try_map_indexed(self.rings.len(), mode, |i| {
            let ring = &self.rings[i];
            let mut acc = CompensatedSum::default();
            let mut abs = 0.0;
            for p in &ring.points {
                let v = f(p)?;
                acc.add(v);
                abs += v.norm();
            }
            Ok::<_, Error>((acc.value() * ring.weight, abs * ring.weight))
        })?;
        let mut total = CompensatedSum::default();
        let mut abs = 0.0;
        for (v, a) in per_ring {
            total.add(v);
            abs += a;
        }
        Ok((total.value(), abs))
    }

    /// Integrates the `n` components of a vector-valued `f` in one pass over the
    /// nodes; returns `(integral, integral of |f_k|)` per component.
    pub fn integrate_many<F>(&self, n: usize, f: F, mode: Mode) -> Result<Vec<(Complex64, f64)>>
    where
        F: Fn(&AnnulusPoint) -> Result<Vec<Complex64>> + Sync,
    {
        let per_ring = try_map_indexed(self.rings.len(), mode, |i| {
            let ring = &self.rings[i];
            let mut acc = vec![CompensatedSum::default(); n];
            let mut abs = vec![0.0; n];
            for p in &ring.points {
                let values = f(p)?;
                if values.len() != n {
                    return Err(Error::InvalidParameter(format!(
                        "integrand returned {} values, expected {n}",
                        values.len()
                    )));
                }
                for (k, v) in values.into_iter().enumerate() {
                    acc[k].add(v);
                    abs[k] += v.norm();
                }
            }
            Ok::<_, Error>((acc, abs, ring.weight))
        })?;
        let mut total = vec![CompensatedSum::default(); n];
        let mut abs = vec![0.0; n];
        for (acc, a, weight) in per_ring {
            for k in 0..n {
                total[k].add(acc[k].value() * weight);
                abs[k] += a[k] * weight;
            }
        }
        Ok(total.iter().zip(abs).map(|(t, a)| (t.value(), a)).collect())
    }
}

/// An integral with its self-convergence delta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    /// `|I(2 n_radial) - I(n_radial)|` relative to the integral of `|f|`.
    pub delta: f64,
}

/// Integrates on `spec` and on the radially doubled rule; returns the finer value.
pub fn annulus_integrate<F>(f: F, spec: &QuadratureSpec, params: &AnnulusParams, mode: Mode) -> Result<Integral>
where
    F: Fn(&AnnulusPoint) -> Result<Complex64> + Sync,
{
    let coarse = AnnulusRule::new(spec, params)?.integrate(&f, mode)?;
    let fine = AnnulusRule::new(&spec.doubled(), params)?.integrate(&f, mode)?;
    let delta = if fine.1 > 0.0 { (fine.0 - coarse.0).norm() / fine.1 } else { 0.0 };
    if delta > SELF_CONVERGENCE {
        return Err(Error::Quadrature { delta });
    }
    Ok(Integral { value: fine.0, delta })
}

/// Vector-valued [`annulus_integrate`]. Deltas are reported, not enforced,
/// so that callers can compare them with their own tolerances.
pub fn annulus_integrate_many<F>(
    n: usize,
    f: F,
    spec: &QuadratureSpec,
    params: &AnnulusParams,
    mode: Mode,
) -> Result<Vec<Integral>>
where
    F: Fn(&AnnulusPoint) -> Result<Vec<Complex64>> + Sync,
{
    let coarse = AnnulusRule::new(spec, params)?.integrate_many(n, &f, mode)?;
    let fine = AnnulusRule::new(&spec.doubled(), params)?.integrate_many(n, &f, mode)?;
    Ok(coarse
        .into_iter()
        .zip(fine)
        .map(|((c, _), (v, abs))| Integral { value: v, delta: if abs > 0.0 { (v - c).norm() / abs } else { 0.0 } })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{basis_norm_sq, basis_phi, BasisIndex, LevelIndex};

    #[test]
    fn area_and_odd_modes() {
        let p = AnnulusParams::new(2.0, 1.0).unwrap();
        let spec = QuadratureSpec::default_for(&p).unwrap();
        let one = annulus_integrate(|_| Ok(Complex64::new(1.0, 0.0)), &spec, &p, Mode::default()).unwrap();
        assert!((one.value.re - 3.0 * PI).abs() < 1e-13 * 3.0 * PI);
        let odd = annulus_integrate(|z| Ok(z.z()), &spec, &p, Mode::default()).unwrap();
        assert!(odd.value.norm() < 1e-13);
    }

    #[test]
    fn angular_rule_kills_fourier_modes() {
        let p = AnnulusParams::new(4.0, 2.0).unwrap();
        let spec = QuadratureSpec::new(16, 32, &p).unwrap();
        let rule = AnnulusRule::new(&spec, &p).unwrap();
        for k in 1..16 {
            let (v, a) =
                rule.integrate(|z| Ok(Complex64::from_polar(1.0, k as f64 * z.arg())), Mode::Sequential).unwrap();
            assert!(v.norm() < 1e-14 * a, "mode {k}: {}", v.norm() / a);
        }
    }

    #[test]
    fn norm_of_level_one() {
        let p = AnnulusParams::new(4.0, 3.0).unwrap();
        let spec = QuadratureSpec::default_for(&p).unwrap();
        let m = LevelIndex::new(1, &p).unwrap();
        let j = BasisIndex::new(0).unwrap();
        let q = annulus_integrate(
            |z| Ok(Complex64::new(basis_phi(j, m, z, &p)?.norm_sqr(), 0.0)),
            &spec,
            &p,
            Mode::default(),
        )
        .unwrap();
        let want = basis_norm_sq(j, m, &p).unwrap();
        assert!((q.value.re - want).abs() < 1e-8 * want);
    }

    #[test]
    fn modes_agree_bitwise() {
        let p = AnnulusParams::new(4.0, 3.0).unwrap();
        let spec = QuadratureSpec::default_for(&p).unwrap();
        let f = |z: &AnnulusPoint| Ok(z.z().powi(2).conj() * z.modulus());
        let a = AnnulusRule::new(&spec, &p).unwrap().integrate(f, Mode::Sequential).unwrap();
        let b = AnnulusRule::new(&spec, &p).unwrap().integrate(f, Mode::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn vector_integration_matches_scalar() {
        let p = AnnulusParams::new(4.0, 2.0).unwrap();
        let spec = QuadratureSpec::new(32, 48, &p).unwrap();
        let f = |z: &AnnulusPoint| Ok(vec![Complex64::new(1.0, 0.0), z.z().conj() * z.z(), z.z()]);
        let many = annulus_integrate_many(3, f, &spec, &p, Mode::default()).unwrap();
        let one = annulus_integrate(|z| Ok(z.z().norm_sqr().into()), &spec, &p, Mode::default()).unwrap();
        assert_eq!(many[1].value, one.value);
        assert!(many[2].value.norm() < 1e-13 && many.iter().all(|i| i.delta < 1e-12));
        let bad = AnnulusRule::new(&spec, &p).unwrap().integrate_many(2, f, Mode::Sequential);
        assert!(bad.is_err());
    }

    #[test]
    fn spec_validation() {
        let p = AnnulusParams::new(4.0, 3.0).unwrap();
        assert!(QuadratureSpec::new(127, 96, &p).is_err());
        assert!(QuadratureSpec::new(128, 16, &p).is_err());
        assert!(QuadratureSpec::default_for(&AnnulusParams::new(4.0, 0.75).unwrap()).is_err());
        assert!(QuadratureSpec::new(20, 32, &p).unwrap().resolves_mode(9));
        assert!(!QuadratureSpec::new(20, 32, &p).unwrap().resolves_mode(10));
    }
}
