//! The annulus `1 < |z| < R`, its Poincare density and the radial coordinates
//! `zeta = pi ln|z| / ln R` and `xi = cot zeta`.
//!
//! Radial quantities are computed from `ln|z|`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points closer than this fraction of `R - 1` to a boundary circle are rejected.
pub const INTERIOR_MARGIN: f64 = 1e-9;

/// Outer radius `R > 1` and magnetic weight `B > 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusParams {
    r: f64,
    b: f64,
}

impl AnnulusParams {
    pub fn new(r: f64, b: f64) -> Result<Self> {
        if !(r > 1.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!("outer radius R must exceed 1, got {r}")));
        }
        if !(b > 0.5 && b.is_finite()) {
            return Err(Error::InvalidParameter(format!("magnetic weight B must exceed 1/2, got {b}")));
        }
        Ok(Self { r, b })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn ln_r(&self) -> f64 {
        self.r.ln()
    }

    /// `B` as an integer, if it is one.
    pub fn integer_b(&self) -> Option<u32> {
        (self.b.fract() == 0.0 && self.b <= f64::from(u32::MAX)).then_some(self.b as u32)
    }

    /// `alpha(j, B) = (2/pi)(j + B) ln R`.
    pub fn alpha(&self, j: i64) -> f64 {
        2.0 / PI * (j as f64 + self.b) * self.ln_r()
    }

    pub fn point(&self, z: Complex64) -> Result<AnnulusPoint> {
        AnnulusPoint::new(z, self)
    }
}

/// A point strictly inside the annulus, away from the boundary margin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusPoint {
    z: Complex64,
    ln_modulus: f64,
}

impl AnnulusPoint {
    pub fn new(z: Complex64, params: &AnnulusParams) -> Result<Self> {
        let modulus = z.norm();
        let margin = INTERIOR_MARGIN * (params.r - 1.0);
        if !(modulus - 1.0 >= margin && params.r - modulus >= margin) {
            return Err(Error::Domain { re: z.re, im: z.im });
        }
        Ok(Self { z, ln_modulus: modulus.ln() })
    }

    /// Builds the point `R^{zeta/pi} e^{i theta}`.
    pub fn from_polar_zeta(zeta: f64, theta: f64, params: &AnnulusParams) -> Result<Self> {
        let ln_modulus = zeta / PI * params.ln_r();
        let z = Complex64::from_polar(ln_modulus.exp(), theta);
        Self::new(z, params).map(|p| Self { ln_modulus, ..p })
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn ln_modulus(&self) -> f64 {
        self.ln_modulus
    }

    pub fn modulus(&self) -> f64 {
        self.ln_modulus.exp()
    }

    pub fn arg(&self) -> f64 {
        self.z.arg()
    }

    /// Distance to the nearer boundary circle.
    pub fn boundary_distance(&self, params: &AnnulusParams) -> f64 {
        let m = self.z.norm();
        (m - 1.0).min(params.r - m)
    }
}

/// `omega_R(z) = (ln R / pi) |z| sin(pi ln|z| / ln R)`.
pub fn poincare_density(z: &AnnulusPoint, params: &AnnulusParams) -> f64 {
    params.ln_r() / PI * z.modulus() * zeta_coordinate(z, params).sin()
}

/// `d omega_R / dz = (ln R/pi sin zeta + cos zeta) conj(z) / (2|z|)`.
pub fn poincare_density_dz(z: &AnnulusPoint, params: &AnnulusParams) -> Complex64 {
    let zeta = zeta_coordinate(z, params);
    let radial = params.ln_r() / PI * zeta.sin() + zeta.cos();
    z.z().conj() * (radial / (2.0 * z.modulus()))
}

pub fn zeta_coordinate(z: &AnnulusPoint, params: &AnnulusParams) -> f64 {
    PI * z.ln_modulus() / params.ln_r()
}

pub fn xi_coordinate(z: &AnnulusPoint, params: &AnnulusParams) -> f64 {
    let zeta = zeta_coordinate(z, params);
    zeta.cos() / zeta.sin()
}

/// The inversion `z -> R / z`.
pub fn invert_point(z: &AnnulusPoint, params: &AnnulusParams) -> Result<AnnulusPoint> {
    let w = params.r / z.z();
    AnnulusPoint::new(w, params).map(|p| AnnulusPoint { ln_modulus: params.ln_r() - z.ln_modulus(), ..p })
}

pub fn alpha_index(j: i64, params: &AnnulusParams) -> f64 {
    params.alpha(j)
}

/// `omega_R(z)^{2B-2}`, the density of the weighted measure.
pub fn measure_weight(z: &AnnulusPoint, params: &AnnulusParams) -> f64 {
    let exponent = 2.0 * params.b - 2.0;
    if exponent == 0.0 {
        return 1.0;
    }
    poincare_density(z, params).powf(exponent)
}
