//! Verification suites: named batteries of residuals with declared
//! tolerances, run at one parameter set and reported as JSON-ready values.
//!
//! Sampled points are drawn uniformly in `(zeta, theta)` over
//! `(0.15 pi, 0.85 pi) x (0, 2 pi)` from a seeded ChaCha8 stream, so a report
//! is a pure function of its inputs (apart from `runtime_s`).

mod checks;
mod suites;

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AnnulusParams, AnnulusPoint};
use crate::par::Mode;
use crate::quadrature::QuadratureSpec;
use crate::special::SeriesControl;
use crate::spectral::{admissible_levels, LevelIndex};

pub use checks::{
    gram_matrix, reproducing_check, reproducing_residual, window_indices, GramMatrix, ReproducingOutcome,
};

/// Every suite name accepted by [`run_suite`], `all` last.
pub const SUITES: [&str; 11] = [
    "special-functions",
    "geometry",
    "basis",
    "gram",
    "reproducing",
    "eigen",
    "polyanalytic",
    "multipath",
    "inversion",
    "theta",
    "all",
];

/// Suites that need an integer `B`.
pub const INTEGER_B_SUITES: [&str; 2] = ["inversion", "theta"];

/// Default seed of the sampled points.
pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    /// Restrict level-dependent checks to one level; `None` runs every admissible level.
    pub level: Option<usize>,
    /// Gram window: indices with `|j + B| <= window`.
    pub window: i64,
    pub seed: u64,
    /// Number of sampled points (or pairs) per check.
    pub points: usize,
    /// Number of evaluation points of the reproducing check.
    pub reproducing_points: usize,
    /// Quadrature rule; `None` selects [`QuadratureSpec::default_for`].
    pub quadrature: Option<QuadratureSpec>,
    pub ctrl: SeriesControl,
    pub mode: Mode,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            level: None,
            window: 8,
            seed: DEFAULT_SEED,
            points: 20,
            reproducing_points: 5,
            quadrature: None,
            ctrl: SeriesControl::default(),
            mode: Mode::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "B")]
    pub b: f64,
    /// The level under test, or `None` for all admissible levels.
    pub m: Option<usize>,
    pub window: i64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
}

impl Residual {
    /// `NaN` never passes.
    pub fn passes(&self) -> bool {
        self.value <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub params: ReportParams,
    pub residuals: Vec<Residual>,
    pub pass: bool,
    pub runtime_s: f64,
    /// Sub-suites of `all` that do not apply to the parameters.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<String>,
}

impl SuiteReport {
    /// The residual with the largest `value / tolerance`.
    pub fn worst(&self) -> Option<&Residual> {
        self.residuals.iter().max_by(|a, b| {
            let ra = a.value / a.tolerance;
            let rb = b.value / b.tolerance;
            ra.partial_cmp(&rb).unwrap_or(if ra.is_nan() {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Less
            })
        })
    }

    pub fn failures(&self) -> impl Iterator<Item = &Residual> {
        self.residuals.iter().filter(|r| !r.passes())
    }
}

/// Residual collector shared by the suites.
#[derive(Debug, Default)]
pub(crate) struct Collector {
    residuals: Vec<Residual>,
}

impl Collector {
    /// Records the maximum of `values`; a `NaN` anywhere propagates.
    pub fn max<I: IntoIterator<Item = f64>>(&mut self, name: impl Into<String>, tolerance: f64, values: I) {
        let value =
            values.into_iter().fold(0.0, |acc: f64, v| if v.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(v) });
        self.residuals.push(Residual { name: name.into(), value, tolerance });
    }

    pub fn push(&mut self, name: impl Into<String>, tolerance: f64, value: f64) {
        self.residuals.push(Residual { name: name.into(), value, tolerance });
    }
}

/// Resolved inputs of one suite run.
pub(crate) struct Context<'a> {
    pub params: &'a AnnulusParams,
    pub options: &'a SuiteOptions,
    pub levels: Vec<LevelIndex>,
    pub points: Vec<AnnulusPoint>,
    pub pairs: Vec<(AnnulusPoint, AnnulusPoint)>,
}

impl Context<'_> {
    pub fn quadrature(&self) -> Result<QuadratureSpec> {
        match self.options.quadrature {
            Some(spec) => Ok(spec),
            None => QuadratureSpec::default_for(self.params),
        }
    }
}

/// `n` points uniform in `(zeta, theta)` over `(0.15 pi, 0.85 pi) x (0, 2 pi)`.
pub fn sample_points(params: &AnnulusParams, seed: u64, n: usize) -> Result<Vec<AnnulusPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let zeta = rng.gen_range(0.15 * PI..0.85 * PI);
            let theta = rng.gen_range(0.0..2.0 * PI);
            AnnulusPoint::from_polar_zeta(zeta, theta, params)
        })
        .collect()
}

/// `n` pairs built from consecutive sampled points.
pub fn sample_pairs(params: &AnnulusParams, seed: u64, n: usize) -> Result<Vec<(AnnulusPoint, AnnulusPoint)>> {
    let pts = sample_points(params, seed, 2 * n)?;
    Ok(pts.chunks(2).map(|c| (c[0], c[1])).collect())
}

/// Runs the named suite.
///
/// `inversion` and `theta` need an integer `B` and fail with
/// [`Error::UnsupportedPath`] otherwise; `all` skips them and lists them in
/// [`SuiteReport::skipped`].
pub fn run_suite(name: &str, params: &AnnulusParams, options: &SuiteOptions) -> Result<SuiteReport> {
    if !SUITES.contains(&name) {
        return Err(Error::UnknownSuite(name.to_string()));
    }
    let start = Instant::now();
    let levels = match options.level {
        Some(m) => vec![LevelIndex::new(m, params)?],
        None => admissible_levels(params),
    };
    let ctx = Context {
        params,
        options,
        levels,
        points: sample_points(params, options.seed, options.points)?,
        pairs: sample_pairs(params, options.seed, options.points)?,
    };
    let mut out = Collector::default();
    let mut skipped = Vec::new();
    if name == "all" {
        for suite in SUITES.iter().filter(|s| **s != "all") {
            if params.integer_b().is_none() && INTEGER_B_SUITES.contains(suite) {
                skipped.push(suite.to_string());
                continue;
            }
            suites::run(suite, &ctx, &mut out)?;
        }
    } else {
        suites::run(name, &ctx, &mut out)?;
    }
    let pass = out.residuals.iter().all(Residual::passes);
    Ok(SuiteReport {
        suite: name.to_string(),
        params: ReportParams {
            r: params.r(),
            b: params.b(),
            m: options.level,
            window: options.window,
            seed: options.seed,
        },
        residuals: out.residuals,
        pass,
        runtime_s: start.elapsed().as_secs_f64(),
        skipped,
    })
}

#[cfg(test)]
mod tests;
