//! A kernel evaluator with a precomputed Gamma ladder, for bulk evaluation at
//! fixed parameters and level.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{kernel_km_with, pair_geometry, KernelEvaluation};
use crate::error::Result;
use crate::geometry::{AnnulusParams, AnnulusPoint};
use crate::special::gamma::log_gamma_abs_sq;
use crate::special::SeriesControl;
use crate::spectral::LevelIndex;

/// Caches `ln |Gamma(B - m + i (j+B) ln R/pi)|^2` for `|j + B| <= window`;
/// indices outside the window are computed on demand.
#[derive(Debug, Clone)]
pub struct KernelEngine {
    params: AnnulusParams,
    level: LevelIndex,
    ctrl: SeriesControl,
    lo: i64,
    ladder: Vec<f64>,
}

impl KernelEngine {
    pub fn new(params: AnnulusParams, level: LevelIndex, ctrl: SeriesControl, window: usize) -> Result<Self> {
        let b = params.b();
        let c = b - level.get() as f64;
        let lpi = params.ln_r() / PI;
        let lo = (-b - window as f64).ceil() as i64;
        let hi = (-b + window as f64).floor() as i64;
        let ladder = (lo..=hi).map(|j| log_gamma_abs_sq(c, (j as f64 + b) * lpi)).collect::<Result<Vec<_>>>()?;
        Ok(Self { params, level, ctrl, lo, ladder })
    }

    pub fn params(&self) -> &AnnulusParams {
        &self.params
    }

    pub fn level(&self) -> LevelIndex {
        self.level
    }

    fn log_gamma_pair(&self, j: i64) -> Result<f64> {
        let idx = j - self.lo;
        if idx >= 0 && (idx as usize) < self.ladder.len() {
            return Ok(self.ladder[idx as usize]);
        }
        let b = self.params.b();
        log_gamma_abs_sq(b - self.level.get() as f64, (j as f64 + b) * self.params.ln_r() / PI)
    }

    pub fn evaluate(&self, z: &AnnulusPoint, w: &AnnulusPoint) -> Result<KernelEvaluation> {
        let geom = pair_geometry(z, w, &self.params);
        kernel_km_with(self.level, &geom, &self.params, &self.ctrl, |j| self.log_gamma_pair(j))
    }

    pub fn value(&self, z: &AnnulusPoint, w: &AnnulusPoint) -> Result<Complex64> {
        self.evaluate(z, w).map(|e| e.value)
    }
}
