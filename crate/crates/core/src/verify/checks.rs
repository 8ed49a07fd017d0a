//! Quadrature-based checks of the eigenbasis and the kernel.

use crate::error::{Error, Result};
use crate::geometry::{AnnulusParams, AnnulusPoint};
use crate::kernel::kernel_km;
use crate::par::Mode;
use crate::quadrature::{annulus_integrate_many, Integral, QuadratureSpec};
use crate::special::SeriesControl;
use crate::spectral::{orthonormal_phi_raw, LevelIndex};

/// Indices `j` with `|j + B| <= window`.
pub fn window_indices(params: &AnnulusParams, window: i64) -> Vec<i64> {
    let b = params.b();
    let lo = (-b - window as f64).ceil() as i64;
    let hi = (-b + window as f64).floor() as i64;
    (lo..=hi).collect()
}

/// Gram matrix `<Phi_j, Phi_k>` of the orthonormal basis over a window.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub indices: Vec<i64>,
    /// Row-major entries.
    pub entries: Vec<Integral>,
}

impl GramMatrix {
    pub fn entry(&self, row: usize, col: usize) -> Integral {
        self.entries[row * self.indices.len() + col]
    }

    fn cells(&self) -> impl Iterator<Item = (usize, usize, Integral)> + '_ {
        let n = self.indices.len();
        self.entries.iter().enumerate().map(move |(k, e)| (k / n, k % n, *e))
    }

    pub fn max_diagonal_error(&self) -> f64 {
        self.cells().filter(|(r, c, _)| r == c).map(|(_, _, e)| (e.value - 1.0).norm()).fold(0.0, f64::max)
    }

    pub fn max_off_diagonal(&self) -> f64 {
        self.cells().filter(|(r, c, _)| r != c).map(|(_, _, e)| e.value.norm()).fold(0.0, f64::max)
    }

    pub fn max_delta(&self) -> f64 {
        self.entries.iter().map(|e| e.delta).fold(0.0, f64::max)
    }
}

/// Gram matrix of level `m` over `|j + B| <= window`.
pub fn gram_matrix(
    m: LevelIndex,
    window: i64,
    spec: &QuadratureSpec,
    params: &AnnulusParams,
    mode: Mode,
) -> Result<GramMatrix> {
    let indices = window_indices(params, window);
    let span = (indices.last().unwrap_or(&0) - indices.first().unwrap_or(&0)) as usize;
    if !spec.resolves_mode(span) {
        return Err(Error::InvalidParameter(format!(
            "{} angular nodes cannot separate Fourier modes {span} apart",
            spec.n_angular
        )));
    }
    let n = indices.len();
    let entries = annulus_integrate_many(
        n * n,
        |w| {
            let phi = indices.iter().map(|&j| orthonormal_phi_raw(j, m, w, params)).collect::<Result<Vec<_>>>()?;
            Ok(phi.iter().flat_map(|a| phi.iter().map(move |b| a * b.conj())).collect())
        },
        spec,
        params,
        mode,
    )?;
    Ok(GramMatrix { indices, entries })
}

/// Result of reproducing one test function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReproducingOutcome {
    /// Level of the test function.
    pub level: LevelIndex,
    pub j0: i64,
    /// `|int K_m(z, w) Phi_{j0}(w) dmu_B(w) - Phi_{j0}(z)| / |Phi_{j0}(z)|`.
    pub residual: f64,
    pub delta: f64,
}

/// Applies `K_m(z, .)` to every test function `Phi_{j0}` of the listed levels.
///
/// Test functions of level `m` are reproduced (residual near 0); those of
/// other levels are annihilated, since distinct levels are orthogonal
/// (residual near 1).
pub fn reproducing_check(
    m: LevelIndex,
    z: &AnnulusPoint,
    tests: &[(LevelIndex, i64)],
    spec: &QuadratureSpec,
    params: &AnnulusParams,
    ctrl: &SeriesControl,
    mode: Mode,
) -> Result<Vec<ReproducingOutcome>> {
    let integrals = annulus_integrate_many(
        tests.len(),
        |w| {
            let k = kernel_km(m, z, w, params, ctrl)?.value;
            tests.iter().map(|&(level, j)| Ok(k * orthonormal_phi_raw(j, level, w, params)?)).collect()
        },
        spec,
        params,
        mode,
    )?;
    tests
        .iter()
        .zip(integrals)
        .map(|(&(level, j0), integral)| {
            let at_z = orthonormal_phi_raw(j0, level, z, params)?;
            Ok(ReproducingOutcome {
                level,
                j0,
                residual: (integral.value - at_z).norm() / at_z.norm(),
                delta: integral.delta,
            })
        })
        .collect()
}

/// Relative residual of the reproducing property for `Phi_{j0}` at `z`.
pub fn reproducing_residual(
    m: LevelIndex,
    z: &AnnulusPoint,
    j0: i64,
    spec: &QuadratureSpec,
    params: &AnnulusParams,
    ctrl: &SeriesControl,
) -> Result<f64> {
    let out = reproducing_check(m, z, &[(m, j0)], spec, params, ctrl, Mode::default())?;
    Ok(out[0].residual)
}
