//! The individual suites. Each appends named residuals to a [`Collector`].

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::checks::{gram_matrix, reproducing_check};
use super::{Collector, Context};
use crate::error::{Error, Result};
use crate::geometry::{invert_point, poincare_density, xi_coordinate, AnnulusParams, AnnulusPoint};
use crate::kernel::{
    inversion_covariance_residual, kernel_basis_sum_auto, kernel_jacobi_product, kernel_k0_b1, kernel_k0_closed,
    kernel_k0_integer_product, kernel_km, kernel_km_product, kernel_km_theta,
};
use crate::par::try_map_indexed;
use crate::quadrature::annulus_integrate_many;
use crate::special::gamma::factorial;
use crate::special::gamma::{gamma_pair_product_integer, log_gamma, pochhammer_real};
use crate::special::jacobi::{jacobi_poly, JacobiParams};
use crate::special::romanovski::{
    cauchy_beta_integral, routh_coefficients, routh_leading_coefficient, routh_rodrigues_oracle, routh_romanovski,
};
use crate::special::theta::{theta4, theta4_log_derivative};
use crate::spectral::{
    basis_log_norm_sq, basis_phi, basis_radial, cr_power_apply, cr_scale, default_cr_step, default_step,
    landau_laplacian_apply, landau_level_eigenvalue, sturm_liouville_apply, BasisIndex, LevelIndex,
};

pub(crate) fn run(name: &str, ctx: &Context, out: &mut Collector) -> Result<()> {
    match name {
        "special-functions" => special_functions(ctx, out),
        "geometry" => geometry(ctx, out),
        "basis" => basis(ctx, out),
        "gram" => gram(ctx, out),
        "reproducing" => reproducing(ctx, out),
        "eigen" => eigen(ctx, out),
        "polyanalytic" => polyanalytic(ctx, out),
        "multipath" => multipath(ctx, out),
        "inversion" => inversion(ctx, out),
        "theta" => theta(ctx, out),
        other => Err(Error::UnknownSuite(other.to_string())),
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn rel_real(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Suite-specific random stream, derived from the report seed.
fn stream(ctx: &Context, salt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.options.seed);
    rng.set_stream(salt);
    rng
}

/// `int_0^pi f(theta) dtheta` by Gauss-Legendre after `theta = pi (3u^2 - 2u^3)`,
/// which flattens algebraic endpoint behavior.
fn integrate_angle<F: Fn(f64) -> Result<f64>>(f: F, nodes: usize) -> Result<f64> {
    let n = NonZeroUsize::new(nodes).ok_or_else(|| Error::InvalidParameter("empty rule".into()))?;
    let gl = GaussLegendre::new(n);
    let mut sum = 0.0;
    for &(x, w) in gl.as_node_weight_pairs().iter() {
        let u = 0.5 * (x + 1.0);
        let theta = PI * u * u * (3.0 - 2.0 * u);
        sum += 0.5 * w * 6.0 * PI * u * (1.0 - u) * f(theta)?;
    }
    Ok(sum)
}

fn special_functions(ctx: &Context, out: &mut Collector) -> Result<()> {
    let params = ctx.params;
    let mut rng = stream(ctx, 1);

    let mut recurrence = Vec::with_capacity(1000);
    for _ in 0..1000 {
        let z = Complex64::new(rng.gen_range(0.5..50.0), rng.gen_range(-50.0..50.0));
        let next = log_gamma(z + 1.0)?;
        let diff = next - log_gamma(z)? - z.ln();
        let wrapped = Complex64::new(diff.re, (diff.im + PI).rem_euclid(2.0 * PI) - PI);
        recurrence.push(wrapped.norm() / next.norm());
    }
    out.max("special.log_gamma_recurrence", 1e-12, recurrence);

    let reflection = [0.1f64, 1.0, 5.0, 20.0].into_iter().map(|y| {
        let g = (2.0 * log_gamma(Complex64::new(1.0, y))?.re).exp();
        Ok((g * (PI * y).sinh() / (PI * y) - 1.0).abs())
    });
    out.max("special.gamma_reflection", 1e-10, reflection.collect::<Result<Vec<_>>>()?);

    let mut pairs = Vec::new();
    for n in 1..=4u32 {
        for r in [2.0f64, 4.0, 10.0] {
            for j in -30i64..=30 {
                let product = gamma_pair_product_integer(n, 0, j, r)?;
                let general = (2.0 * log_gamma(Complex64::new(f64::from(n), j as f64 * r.ln() / PI))?.re).exp();
                pairs.push(rel_real(product, general));
            }
        }
    }
    out.max("special.gamma_pair_product", 1e-10, pairs);

    let mut symmetry = Vec::with_capacity(200);
    for _ in 0..200 {
        let mut c = |s: f64| Complex64::new(rng.gen_range(-s..s), rng.gen_range(-s..s));
        let (a, b, x) = (c(3.0), c(3.0), c(1.5));
        let m = rng.gen_range(0..=6usize);
        let lhs = jacobi_poly(&JacobiParams::new(b, a, m)?, -x);
        let rhs = jacobi_poly(&JacobiParams::new(a, b, m)?, x) * if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        symmetry.push(rel(lhs, rhs));
    }
    out.max("special.jacobi_symmetry", 1e-11, symmetry);

    let mut bateman = Vec::new();
    for _ in 0..50 {
        let (a, b) = (rng.gen_range(-0.9..3.0), rng.gen_range(-0.9..3.0));
        let (x, y) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        for m in 0..=4usize {
            let p = JacobiParams::real(a, b, m)?;
            let lhs = jacobi_poly(&p, x.into()) * jacobi_poly(&p, y.into());
            bateman.push(rel_real(bateman_expansion(m, a, b, x, y), lhs.re));
        }
    }
    out.max("special.bateman", 1e-10, bateman);

    let b = params.b();
    let mut residue = Vec::new();
    let mut rodrigues = Vec::new();
    for _ in 0..40 {
        let m = rng.gen_range(0..=4usize);
        let a = rng.gen_range(-6.0..6.0);
        let x = rng.gen_range(-2.0..2.0);
        let direct = routh_romanovski(m, a, 1.0 - b, x)?;
        residue.push(direct.imag_residue);
        let oracle = routh_rodrigues_oracle(m, a, 1.0 - b, x)?;
        rodrigues.push((oracle - direct.value).abs() / direct.value.abs().max(1.0));
    }
    out.max("special.routh_imaginary_residue", 1e-10, residue);
    out.max("special.rodrigues", 1e-7, rodrigues);

    let mut leading = Vec::new();
    for m in &ctx.levels {
        let want = routh_leading_coefficient(m.get(), b)?;
        for j in [-5i64, 0, 5] {
            let coeffs = routh_coefficients(m.get(), -params.alpha(j), 1.0 - b)?;
            leading.push(rel_real(coeffs[m.get()], want));
        }
    }
    out.max("special.leading_coefficient", 1e-12, leading);

    out.max("special.finite_orthogonality", 1e-8, finite_orthogonality(params)?);

    let beta =
        [(0.0f64, 0.0f64), (0.0, 2.0), (1.0, 1.0), (-2.3, 3.5), (4.1, 0.5), (0.7, -0.5)].into_iter().map(|(p, nu)| {
            let quad = integrate_angle(|x| Ok((-p * x).exp() * x.sin().powf(nu)), 400)?;
            Ok(rel_real(cauchy_beta_integral(p, nu)?, quad))
        });
    out.max("special.cauchy_beta", 1e-10, beta.collect::<Result<Vec<_>>>()?);

    let r = params.r();
    let shift = Complex64::new(0.0, r.ln());
    let quasi =
        [Complex64::new(0.3, 0.1), Complex64::new(-1.1, 0.2), Complex64::new(2.0, -0.15)].into_iter().map(|z| {
            let lhs = theta4(z + shift, r, &ctx.options.ctrl)?;
            let rhs =
                -(Complex64::new(r.ln(), 0.0) - Complex64::i() * z * 2.0).exp() * theta4(z, r, &ctx.options.ctrl)?;
            Ok(rel(lhs, rhs))
        });
    out.max("special.theta_quasi_periodicity", 1e-10, quasi.collect::<Result<Vec<_>>>()?);
    Ok(())
}

/// Bateman's double-sum expansion of `P_m^{(a,b)}(x) P_m^{(a,b)}(y)`, with the
/// Gamma ratios written as Pochhammer symbols.
fn bateman_expansion(m: usize, a: f64, b: f64, x: f64, y: f64) -> f64 {
    let minus = 1.0 + x * y - x - y;
    let plus = 1.0 + x * y + x + y;
    let mut sum = 0.0;
    for k in 0..=m {
        let mut inner = 0.0;
        for l in 0..=k {
            inner += minus.powi(l as i32) * plus.powi((k - l) as i32) / (factorial(l) * factorial(k - l))
                * pochhammer_real(a + l as f64 + 1.0, m - l)
                * pochhammer_real(b + (k - l) as f64 + 1.0, m - k + l);
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * pochhammer_real(a + b + m as f64 + 1.0, k) / (4f64.powi(k as i32) * factorial(m - k)) * inner;
    }
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * sum / factorial(m)
}

/// Off-diagonal `int R_p R_q rho_j dxi` relative to the diagonal norms, for
/// `p != q`, `p + q <= 2B - 2`, through `xi = cot theta`.
fn finite_orthogonality(params: &AnnulusParams) -> Result<Vec<f64>> {
    let b = params.b();
    let top = (b - 0.5 - 1e-9).floor().max(0.0) as usize;
    let mut out = Vec::new();
    for j in [-3i64, 0, 3] {
        let a = -params.alpha(j);
        let alpha = params.alpha(j);
        let inner = |p: usize, q: usize| {
            integrate_angle(
                |theta| {
                    let xi = theta.cos() / theta.sin();
                    let rp = routh_romanovski(p, a, 1.0 - b, xi)?.value;
                    let rq = routh_romanovski(q, a, 1.0 - b, xi)?.value;
                    Ok(rp * rq * (alpha * theta).exp() * theta.sin().powf(2.0 * b - 2.0))
                },
                400,
            )
        };
        let diag = (0..=top).map(|p| inner(p, p)).collect::<Result<Vec<_>>>()?;
        for p in 0..=top {
            for q in 0..p {
                if (p + q) as f64 <= 2.0 * b - 2.0 {
                    out.push(inner(p, q)?.abs() / (diag[p] * diag[q]).sqrt());
                }
            }
        }
    }
    Ok(out)
}

fn geometry(ctx: &Context, out: &mut Collector) -> Result<()> {
    let params = ctx.params;
    let nonpositive = ctx.points.iter().filter(|z| !(poincare_density(z, params) > 0.0)).count();
    out.push("geometry.density_nonpositive_count", 0.0, nonpositive as f64);
    let mut isometry = Vec::new();
    let mut involution = Vec::new();
    let mut xi_flip = Vec::new();
    for z in &ctx.points {
        let w = invert_point(z, params)?;
        let rhs = params.r() / z.modulus().powi(2) * poincare_density(z, params);
        isometry.push(rel_real(poincare_density(&w, params), rhs));
        involution.push((invert_point(&w, params)?.z() - z.z()).norm() / z.modulus());
        let xi = xi_coordinate(z, params);
        xi_flip.push((xi_coordinate(&w, params) + xi).abs() / (1.0 + xi.abs()));
    }
    out.max("geometry.inversion_isometry", 1e-12, isometry);
    out.max("geometry.inversion_involution", 1e-14, involution);
    out.max("geometry.inversion_xi_antisymmetry", 1e-12, xi_flip);
    Ok(())
}

fn basis(ctx: &Context, out: &mut Collector) -> Result<()> {
    let params = ctx.params;
    let spec = ctx.quadrature()?;
    let items: Vec<(LevelIndex, i64)> = ctx.levels.iter().flat_map(|&m| (-10..=10).map(move |j| (m, j))).collect();
    let integrals = annulus_integrate_many(
        items.len(),
        |z| items.iter().map(|&(m, j)| Ok(basis_phi(BasisIndex::new(j)?, m, z, params)?.norm_sqr().into())).collect(),
        &spec,
        params,
        ctx.options.mode,
    )?;
    for m in &ctx.levels {
        let mut norm = Vec::new();
        let mut delta = Vec::new();
        for (&(level, j), integral) in items.iter().zip(&integrals) {
            if level == *m {
                norm.push(rel_real(integral.value.re, basis_log_norm_sq(j, level, params)?.exp()));
                delta.push(integral.delta);
            }
        }
        out.max(format!("basis.m{}.norm", m.get()), 1e-7, norm);
        out.max(format!("basis.m{}.quadrature_delta", m.get()), 1e-8, delta);
    }
    Ok(())
}

fn gram(ctx: &Context, out: &mut Collector) -> Result<()> {
    let spec = ctx.quadrature()?;
    for &m in &ctx.levels {
        let g = gram_matrix(m, ctx.options.window, &spec, ctx.params, ctx.options.mode)?;
        out.push(format!("gram.m{}.diagonal", m.get()), 1e-7, g.max_diagonal_error());
        out.push(format!("gram.m{}.off_diagonal", m.get()), 1e-12, g.max_off_diagonal());
        out.push(format!("gram.m{}.quadrature_delta", m.get()), 1e-8, g.max_delta());
    }
    Ok(())
}

/// Test indices of the reproducing check.
const REPRODUCING_J0: [i64; 3] = [-2, 0, 3];

fn reproducing(ctx: &Context, out: &mut Collector) -> Result<()> {
    let spec = ctx.quadrature()?;
    let all_levels = crate::spectral::admissible_levels(ctx.params);
    let tests: Vec<(LevelIndex, i64)> =
        all_levels.iter().flat_map(|&l| REPRODUCING_J0.iter().map(move |&j| (l, j))).collect();
    let n = ctx.options.reproducing_points.min(ctx.points.len());
    for &m in &ctx.levels {
        let mut same = Vec::new();
        let mut cross = Vec::new();
        let mut delta = Vec::new();
        for z in &ctx.points[..n] {
            for o in reproducing_check(m, z, &tests, &spec, ctx.params, &ctx.options.ctrl, ctx.options.mode)? {
                if o.level == m {
                    same.push(o.residual);
                    delta.push(o.delta);
                } else {
                    cross.push((o.residual - 1.0).abs());
                }
            }
        }
        out.max(format!("reproducing.m{}.residual", m.get()), 1e-6, same);
        out.max(format!("reproducing.m{}.quadrature_delta", m.get()), 1e-7, delta);
        if !cross.is_empty() {
            out.max(format!("reproducing.m{}.other_levels", m.get()), 1e-6, cross);
        }
    }
    Ok(())
}

fn phi_fn<'a>(j: BasisIndex, m: LevelIndex, params: &'a AnnulusParams) -> impl Fn(Complex64) -> Complex64 + Sync + 'a {
    move |u| {
        AnnulusPoint::new(u, params)
            .and_then(|p| basis_phi(j, m, &p, params))
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    }
}

fn eigen(ctx: &Context, out: &mut Collector) -> Result<()> {
    let params = ctx.params;
    for &m in &ctx.levels {
        let lambda = landau_level_eigenvalue(m, params);
        let laplace = try_map_indexed(ctx.points.len(), ctx.options.mode, |i| {
            let z = &ctx.points[i];
            let j = BasisIndex::new(i as i64 % 21 - 10)?;
            let f = phi_fn(j, m, params);
            let value = f(z.z());
            let applied = landau_laplacian_apply(&f, z, params, default_step(z, params))?;
            Ok::<_, Error>((applied - value * lambda).norm() / (value.norm() * lambda.abs().max(1.0)))
        })?;
        out.max(format!("eigen.m{}.laplacian", m.get()), 1e-4, laplace);
        let mut sl = Vec::new();
        for z in &ctx.points {
            let xi = xi_coordinate(z, params);
            for j in -10..=10 {
                let residual = sturm_liouville_apply(m, j, xi, params)?;
                let value = basis_radial(j, m, xi, params)?;
                sl.push(residual.abs() / (1.0 + value.abs() * lambda.abs()));
            }
        }
        out.max(format!("eigen.m{}.sturm_liouville", m.get()), 1e-9, sl);
    }
    Ok(())
}

/// Highest Cauchy-Riemann power supported by the stencils.
const MAX_CR_ORDER: usize = 3;

fn polyanalytic(ctx: &Context, out: &mut Collector) -> Result<()> {
    let params = ctx.params;
    for &m in ctx.levels.iter().filter(|m| m.get() < MAX_CR_ORDER) {
        let order = m.get() + 1;
        let rows = try_map_indexed(ctx.points.len(), ctx.options.mode, |i| {
            let z = &ctx.points[i];
            let j = BasisIndex::new(i as i64 % 5 - 2)?;
            let f = phi_fn(j, m, params);
            let step = default_cr_step(z, params);
            let kill = cr_power_apply(&f, order, z, params, step)?;
            let keep = if m.get() == 0 { f(z.z()) } else { cr_power_apply(&f, m.get(), z, params, step)? };
            Ok::<_, Error>((kill.norm() / cr_scale(f(z.z()), order, z, params), kill.norm() / keep.norm()))
        })?;
        out.max(format!("polyanalytic.m{}.annihilation", m.get()), 1e-3, rows.iter().map(|r| r.0));
        if m.get() > 0 {
            out.max(format!("polyanalytic.m{}.lower_order_ratio", m.get()), 0.1, rows.iter().map(|r| r.1));
        }
    }
    Ok(())
}

fn multipath(ctx: &Context, out: &mut Collector) -> Result<()> {
    let params = ctx.params;
    let c = &ctx.options.ctrl;
    for &m in &ctx.levels {
        let rows = try_map_indexed(ctx.pairs.len(), ctx.options.mode, |i| {
            let (z, w) = &ctx.pairs[i];
            let k = kernel_km(m, z, w, params, c)?.value;
            let oracle = kernel_basis_sum_auto(m, z, w, params, 1e-14)?.value;
            let swapped = kernel_km(m, w, z, params, c)?.value;
            let diag = kernel_km(m, z, z, params, c)?.value;
            let jacobi = kernel_jacobi_product(m, z, w, params, c)?;
            let mut row = vec![rel(oracle, k), (swapped.conj() - k).norm() / k.norm(), diag.im.abs() / diag.norm()];
            row.push(if diag.re > 0.0 { 0.0 } else { 1.0 });
            row.push(rel(jacobi, k));
            if m.get() == 0 {
                row.push(rel(kernel_k0_closed(z, w, params, c)?.value, k));
            }
            if params.integer_b().is_some() {
                row.push(rel(kernel_km_product(m, z, w, params, c)?.value, k));
                if m.get() == 0 {
                    row.push(rel(kernel_k0_integer_product(z, w, params, c)?.value, k));
                }
                if params.b() == 1.0 {
                    row.push(rel(kernel_k0_b1(z, w, params.r(), c)?, k));
                }
            }
            Ok::<_, Error>(row)
        })?;
        let col = |i: usize| rows.iter().map(move |r| r[i]);
        let tag = format!("multipath.m{}", m.get());
        out.max(format!("{tag}.oracle"), 1e-8, col(0));
        out.max(format!("{tag}.hermitian"), 1e-12, col(1));
        out.max(format!("{tag}.diagonal_imaginary"), 1e-12, col(2));
        out.max(format!("{tag}.diagonal_nonpositive"), 0.0, col(3));
        out.max(format!("{tag}.jacobi_product"), 1e-9, col(4));
        let mut next = 5;
        if m.get() == 0 {
            out.max(format!("{tag}.k0_closed"), 1e-12, col(next));
            next += 1;
        }
        if params.integer_b().is_some() {
            out.max(format!("{tag}.product"), 1e-9, col(next));
            next += 1;
            if m.get() == 0 {
                out.max(format!("{tag}.k0_integer_product"), 1e-9, col(next));
                next += 1;
            }
            if params.b() == 1.0 {
                out.max(format!("{tag}.k0_b1"), 1e-9, col(next));
            }
        }
    }
    Ok(())
}

fn inversion(ctx: &Context, out: &mut Collector) -> Result<()> {
    require_integer(ctx, "inversion")?;
    for &m in &ctx.levels {
        let rows = try_map_indexed(ctx.pairs.len(), ctx.options.mode, |i| {
            let (z, w) = &ctx.pairs[i];
            inversion_covariance_residual(m, z, w, ctx.params, &ctx.options.ctrl)
        })?;
        out.max(format!("inversion.m{}.covariance", m.get()), 1e-10, rows);
    }
    Ok(())
}

fn theta(ctx: &Context, out: &mut Collector) -> Result<()> {
    require_integer(ctx, "theta")?;
    let params = ctx.params;
    let c = &ctx.options.ctrl;
    let r = params.r();
    // Sixth-order Richardson combination of central differences of ln theta_4,
    // at points kept a fixed fraction of ln R away from the zeros at Im z = ln R/2.
    let mut fd = Vec::new();
    let ln_r = params.ln_r();
    for z in [Complex64::new(0.0, 0.2 * ln_r), Complex64::new(0.7, -0.15 * ln_r), Complex64::new(-1.3, 0.07 * ln_r)] {
        let h = 1e-3;
        let ln = |u: Complex64| theta4(u, r, c).map(|v| v.ln());
        let d1 = |h: f64| -> Result<Complex64> { Ok((ln(z + h)? - ln(z - h)?) / (2.0 * h)) };
        let d2 = |h: f64| -> Result<Complex64> { Ok((ln(z + h)? - ln(z)? * 2.0 + ln(z - h)?) / (h * h)) };
        let extrapolate = |d: &dyn Fn(f64) -> Result<Complex64>| -> Result<Complex64> {
            let (a, b, e) = (d(h)?, d(2.0 * h)?, d(4.0 * h)?);
            let (t1, t2) = ((a * 4.0 - b) / 3.0, (b * 4.0 - e) / 3.0);
            Ok((t1 * 16.0 - t2) / 15.0)
        };
        let first = extrapolate(&d1)?;
        let second = extrapolate(&d2)?;
        let exact1 = theta4_log_derivative(1, z, r, c)?;
        let exact2 = theta4_log_derivative(2, z, r, c)?;
        fd.push((first - exact1).norm() / exact1.norm().max(1.0));
        fd.push((second - exact2).norm() / exact2.norm().max(1.0));
    }
    out.max("theta.log_derivative", 1e-8, fd);
    for &m in &ctx.levels {
        let rows = try_map_indexed(ctx.pairs.len(), ctx.options.mode, |i| {
            let (z, w) = &ctx.pairs[i];
            Ok::<_, Error>(rel(kernel_km_theta(m, z, w, params, c)?.value, kernel_km(m, z, w, params, c)?.value))
        })?;
        out.max(format!("theta.m{}.kernel", m.get()), 1e-9, rows);
    }
    Ok(())
}

fn require_integer(ctx: &Context, suite: &str) -> Result<()> {
    if ctx.params.integer_b().is_none() {
        return Err(Error::UnsupportedPath(format!("the {suite} suite needs an integer B, got {}", ctx.params.b())));
    }
    Ok(())
}
