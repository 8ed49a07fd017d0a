use std::f64::consts::PI;
use std::fs;
use std::io::Write;

use annulus_rk::kernel::{
    kernel_basis_sum_auto, kernel_km, kernel_km_product, kernel_km_theta, KernelEngine, KernelEvaluation,
};
use annulus_rk::par::{try_map_indexed, Mode};
use annulus_rk::special::SeriesControl;
use annulus_rk::spectral::{admissible_levels, landau_level_eigenvalue, LevelIndex};
use annulus_rk::verify::{run_suite, SuiteOptions};
use annulus_rk::{AnnulusParams, AnnulusPoint};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::args::{Common, EvalArgs, Format, GridArgs, PathKind, VerifyArgs};
use crate::config::CliConfig;
use crate::exit::{Failure, SUCCESS, VERIFY_FAILED};

/// Coarsest tolerance the basis-sum oracle is asked for.
const ORACLE_TOLERANCE_FLOOR: f64 = 1e-14;

/// Half-width of the cached Gamma ladder of the grid evaluator.
const GRID_LADDER_WINDOW: usize = 256;

/// Runs `f` with the configured parallelism.
fn with_workers<T: Send>(cfg: &CliConfig, f: impl FnOnce(Mode) -> T + Send) -> Result<T, Failure> {
    #[cfg(feature = "parallel")]
    {
        match cfg.workers {
            Some(1) => Ok(f(Mode::Sequential)),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Failure::invalid(format!("cannot start {n} workers: {e}")))?;
                Ok(pool.install(|| f(Mode::Parallel)))
            }
            None => Ok(f(Mode::Parallel)),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = cfg.workers;
        Ok(f(Mode::Sequential))
    }
}

fn emit(cfg: &CliConfig, text: &str) -> Result<(), Failure> {
    match &cfg.out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::invalid(format!("serialization: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn info(common: &Common) -> Result<u8, Failure> {
    let cfg = CliConfig::resolve(common)?;
    let p = &cfg.params;
    let levels: Vec<_> = admissible_levels(p).into_iter().map(|m| (m.get(), landau_level_eigenvalue(m, p))).collect();
    let integer = p.integer_b().is_some();
    let mut paths = vec!["closed", "oracle"];
    if integer {
        paths.extend(["theta", "product"]);
    }
    let text = match cfg.format {
        Some(Format::Json) => to_json(&json!({
            "R": p.r(),
            "B": p.b(),
            "seed": cfg.seed,
            "levels": levels.iter().map(|(m, l)| json!({ "m": m, "lambda": l })).collect::<Vec<_>>(),
            "integer_b": integer,
            "paths": paths,
        }))?,
        Some(Format::Csv) => {
            let mut s = String::from("m,lambda\n");
            for (m, l) in &levels {
                s.push_str(&format!("{m},{l:.16e}\n"));
            }
            s
        }
        None => {
            let mut s = format!("R = {}, B = {}\nadmissible levels:\n", p.r(), p.b());
            for (m, l) in &levels {
                s.push_str(&format!("  m = {m}  lambda = {l}\n"));
            }
            let availability = if integer { "available" } else { "unavailable (B is not an integer)" };
            s.push_str(&format!("theta, product and inversion paths: {availability}\n"));
            s
        }
    };
    emit(&cfg, &text)?;
    Ok(SUCCESS)
}

fn evaluate(
    path: PathKind,
    m: LevelIndex,
    z: &AnnulusPoint,
    w: &AnnulusPoint,
    params: &AnnulusParams,
    ctrl: &SeriesControl,
) -> annulus_rk::Result<KernelEvaluation> {
    match path {
        PathKind::Closed => kernel_km(m, z, w, params, ctrl),
        PathKind::Oracle => kernel_basis_sum_auto(m, z, w, params, ctrl.tolerance.max(ORACLE_TOLERANCE_FLOOR)),
        PathKind::Theta => kernel_km_theta(m, z, w, params, ctrl),
        PathKind::Product => kernel_km_product(m, z, w, params, ctrl),
    }
}

pub fn eval(args: &EvalArgs) -> Result<u8, Failure> {
    let cfg = CliConfig::resolve(&args.common)?;
    let p = &cfg.params;
    let m = LevelIndex::new(cfg.level(), p)?;
    let z = p.point(args.z)?;
    let w = p.point(args.w)?;
    let results = args
        .paths
        .iter()
        .map(|&path| evaluate(path, m, &z, &w, p, &cfg.ctrl).map(|e| (path, e)))
        .collect::<annulus_rk::Result<Vec<_>>>()?;
    let text = match cfg.format {
        Some(Format::Csv) => {
            let mut s = String::from("path,re_K,im_K,abs_K,terms_used,tail_bound\n");
            for (path, e) in &results {
                s.push_str(&format!(
                    "{},{:.16e},{:.16e},{:.16e},{},{:.16e}\n",
                    path.name(),
                    e.value.re,
                    e.value.im,
                    e.value.norm(),
                    e.terms_used,
                    e.tail_bound
                ));
            }
            s
        }
        _ => to_json(&json!({
            "R": p.r(),
            "B": p.b(),
            "m": m.get(),
            "z": pair(args.z),
            "w": pair(args.w),
            "seed": cfg.seed,
            "results": results.iter().map(|(path, e)| json!({
                "path": path.name(),
                "value": pair(e.value),
                "abs": e.value.norm(),
                "terms_used": e.terms_used,
                "tail_bound": e.tail_bound,
            })).collect::<Vec<_>>(),
        }))?,
    };
    emit(&cfg, &text)?;
    Ok(SUCCESS)
}

/// Grid points in radial-major order: `ln|z| = ln R (i+1)/(n_r+1)`, `theta = 2 pi k / n_theta`.
pub fn grid_points(params: &AnnulusParams, n_r: usize, n_theta: usize) -> annulus_rk::Result<Vec<AnnulusPoint>> {
    let mut points = Vec::with_capacity(n_r * n_theta);
    for i in 0..n_r {
        let zeta = PI * (i + 1) as f64 / (n_r + 1) as f64;
        for k in 0..n_theta {
            points.push(AnnulusPoint::from_polar_zeta(zeta, 2.0 * PI * k as f64 / n_theta as f64, params)?);
        }
    }
    Ok(points)
}

pub fn grid(args: &GridArgs) -> Result<u8, Failure> {
    let cfg = CliConfig::resolve(&args.common)?;
    if args.n_r == 0 || args.n_theta == 0 {
        return Err(Failure::invalid("--n-r and --n-theta must be positive"));
    }
    let p = cfg.params;
    let m = LevelIndex::new(cfg.level(), &p)?;
    let w = p.point(args.w)?;
    let points = grid_points(&p, args.n_r, args.n_theta)?;
    let engine = KernelEngine::new(p, m, cfg.ctrl, GRID_LADDER_WINDOW)?;
    let values = with_workers(&cfg, |mode| try_map_indexed(points.len(), mode, |i| engine.value(&points[i], &w)))??;
    let text = match cfg.format {
        Some(Format::Json) => to_json(&json!({
            "R": p.r(),
            "B": p.b(),
            "m": m.get(),
            "w": pair(args.w),
            "n_r": args.n_r,
            "n_theta": args.n_theta,
            "seed": cfg.seed,
            "columns": ["re_z", "im_z", "re_K", "im_K", "abs_K"],
            "rows": points.iter().zip(&values).map(|(z, k)| {
                [z.z().re, z.z().im, k.re, k.im, k.norm()]
            }).collect::<Vec<_>>(),
        }))?,
        _ => {
            let mut s = String::from("re_z,im_z,re_K,im_K,abs_K\n");
            for (z, k) in points.iter().zip(&values) {
                s.push_str(&format!(
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                    z.z().re,
                    z.z().im,
                    k.re,
                    k.im,
                    k.norm()
                ));
            }
            s
        }
    };
    emit(&cfg, &text)?;
    Ok(SUCCESS)
}

pub fn verify(args: &VerifyArgs) -> Result<u8, Failure> {
    let cfg = CliConfig::resolve(&args.common)?;
    if cfg.format == Some(Format::Csv) {
        return Err(Failure::invalid("verification reports are JSON only"));
    }
    let defaults = SuiteOptions::default();
    let report = with_workers(&cfg, |mode| {
        let options = SuiteOptions {
            level: cfg.m,
            window: args.window.unwrap_or(defaults.window),
            seed: cfg.seed,
            quadrature: cfg.quadrature,
            ctrl: cfg.ctrl,
            mode,
            ..defaults
        };
        run_suite(&args.suite, &cfg.params, &options)
    })??;
    emit(&cfg, &to_json(&report)?)?;
    if !report.pass {
        for r in report.failures() {
            eprintln!("FAIL {}: {:e} > {:e}", r.name, r.value, r.tolerance);
        }
        return Ok(VERIFY_FAILED);
    }
    Ok(SUCCESS)
}
