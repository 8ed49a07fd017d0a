//! Resolved run configuration: `--config` JSON values overridden by flags.

use std::fs;
use std::path::PathBuf;

use annulus_rk::quadrature::QuadratureSpec;
use annulus_rk::special::SeriesControl;
use annulus_rk::verify::DEFAULT_SEED;
use annulus_rk::AnnulusParams;
use serde::Deserialize;

use crate::args::{Common, Format};
use crate::exit::Failure;

/// Contents of a `--config` file; every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(rename = "R")]
    pub r: Option<f64>,
    #[serde(rename = "B")]
    pub b: Option<f64>,
    pub m: Option<usize>,
    pub tol: Option<f64>,
    pub max_terms: Option<usize>,
    pub n_ang: Option<usize>,
    pub n_rad: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone)]
pub struct CliConfig {
    pub params: AnnulusParams,
    pub m: Option<usize>,
    pub ctrl: SeriesControl,
    pub quadrature: Option<QuadratureSpec>,
    pub seed: u64,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl CliConfig {
    /// Merges flags over the config file and validates the result.
    pub fn resolve(common: &Common) -> Result<Self, Failure> {
        let file = match &common.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Failure::invalid(format!("cannot read config {}: {e}", path.display())))?;
                serde_json::from_str::<FileConfig>(&text)
                    .map_err(|e| Failure::invalid(format!("invalid config {}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let r = common.r.or(file.r).ok_or_else(|| Failure::invalid("--R is required"))?;
        let b = common.b.or(file.b).ok_or_else(|| Failure::invalid("--B is required"))?;
        let params = AnnulusParams::new(r, b)?;
        let defaults = SeriesControl::default();
        let ctrl = SeriesControl::new(
            common.tol.or(file.tol).unwrap_or(defaults.tolerance),
            common.max_terms.or(file.max_terms).unwrap_or(defaults.max_terms),
            defaults.boundary_margin,
        )?;
        let n_ang = common.n_ang.or(file.n_ang);
        let n_rad = common.n_rad.or(file.n_rad);
        let quadrature = if n_ang.is_some() || n_rad.is_some() {
            let default = QuadratureSpec::default_for(&params)?;
            Some(QuadratureSpec::new(n_ang.unwrap_or(default.n_angular), n_rad.unwrap_or(default.n_radial), &params)?)
        } else {
            None
        };
        let workers = common.workers.or(file.workers);
        if workers == Some(0) {
            return Err(Failure::invalid("--workers must be positive"));
        }
        Ok(Self {
            params,
            m: common.m.or(file.m),
            ctrl,
            quadrature,
            seed: common.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            workers,
            out: common.out.clone().or(file.out),
            format: common.format.or(file.format),
        })
    }

    pub fn level(&self) -> usize {
        self.m.unwrap_or(0)
    }
}
