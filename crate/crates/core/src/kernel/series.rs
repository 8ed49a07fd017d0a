//! Truncation of the bilateral series `sum_j a_j` shared by every kernel path.
//!
//! In each direction the terms decay like `u^d q^u`, where `u = |j - center|`.
//! Once `rho(u) = q ((u+1)/u)^d < 1`, the remainder after a term of modulus
//! `T` is bounded by `T rho / (1 - rho)`. The bound runs on an envelope
//! that never drops faster than `rho`, so a term that vanishes by accident
//! cannot end the sum early.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{converged, CompensatedSum, SeriesControl, SeriesSum};

/// Decay model for one direction of a series.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Decay {
    pub q: f64,
    pub degree: f64,
}

impl Decay {
    pub fn new(q: f64, degree: f64) -> Self {
        Self { q, degree }
    }

    fn ratio(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return f64::INFINITY;
        }
        self.q * ((u + 1.0) / u).powf(self.degree)
    }
}

pub(crate) fn check_decay(q: f64, ctrl: &SeriesControl, what: &str) -> Result<()> {
    if !(q < 1.0 - ctrl.boundary_margin) {
        return Err(Error::Convergence(format!("{what}: decay ratio {q:.6} is within the boundary margin of 1")));
    }
    Ok(())
}

struct Arm {
    decay: Decay,
    step: i64,
    next: i64,
    envelope: f64,
    tail: f64,
    done: bool,
}

impl Arm {
    fn new(decay: Decay, step: i64, first: i64) -> Self {
        Self { decay, step, next: first, envelope: 0.0, tail: f64::INFINITY, done: false }
    }
}

/// Sums `term(j)` outward from `start`, upward with `plus` and downward with
/// `minus` (`None` for a one-sided series starting at `start`).
pub(crate) fn sum_bilateral<F>(
    start: i64,
    center: f64,
    plus: Decay,
    minus: Option<Decay>,
    ctrl: &SeriesControl,
    what: &str,
    mut term: F,
) -> Result<SeriesSum>
where
    F: FnMut(i64) -> Result<Complex64>,
{
    check_decay(plus.q, ctrl, what)?;
    if let Some(d) = minus {
        check_decay(d.q, ctrl, what)?;
    }
    let first = term(start)?;
    let mut sum = CompensatedSum::default();
    sum.add(first);
    let mut abs_sum = first.norm();
    let mut arms = vec![Arm::new(plus, 1, start + 1)];
    if let Some(d) = minus {
        arms.push(Arm::new(d, -1, start - 1));
    }
    let mut terms = 1;
    for _ in 0..ctrl.max_terms {
        for arm in arms.iter_mut().filter(|a| !a.done) {
            let j = arm.next;
            let t = term(j)?;
            sum.add(t);
            abs_sum += t.norm();
            terms += 1;
            arm.next += arm.step;
            let rho = arm.decay.ratio((j as f64 - center).abs());
            arm.envelope = t.norm().max(arm.envelope * rho.min(1.0));
            arm.tail = if rho < 1.0 { arm.envelope * rho / (1.0 - rho) } else { f64::INFINITY };
        }
        let tail: f64 = arms.iter().map(|a| a.tail).sum();
        for arm in arms.iter_mut() {
            arm.done = converged(arm.tail, sum.value().norm(), abs_sum, 0.5 * ctrl.tolerance);
        }
        if arms.iter().all(|a| a.done) {
            return Ok(SeriesSum { value: sum.value(), terms, tail_bound: tail });
        }
    }
    Err(Error::Convergence(format!("{what}: no convergence within {} terms per direction", ctrl.max_terms)))
}
