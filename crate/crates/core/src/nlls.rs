//! Bounded nonlinear least squares with a scaled trust region.
//!
//! Each iteration minimises the Gauss-Newton model of `½‖r(x)‖²` over the
//! free variables inside the ellipsoid `‖D p‖ ≤ Δ`, where `D` holds the
//! running maximum of the Jacobian column norms. The damping `λ` that puts the
//! step on the boundary is found by bisection. A step that leaves the box is
//! either reflected at the violated bound (then clipped) or truncated at the
//! first bound it meets, whichever has the lower model value. Variables held
//! at a bound by a gradient pointing outward are frozen for that iteration.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A residual vector and its Jacobian as functions of the parameters.
pub trait LeastSquaresProblem {
    fn residuals(&self, x: &DVector<f64>) -> DVector<f64>;
    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NllsOptions {
    /// Stop when the ∞-norm of the projected gradient falls to this.
    pub gradient_tol: f64,
    /// Stop when a trial step is no longer than this.
    pub step_tol: f64,
    pub max_iterations: usize,
}

impl Default for NllsOptions {
    fn default() -> Self {
        NllsOptions { gradient_tol: 1e-8, step_tol: 1e-10, max_iterations: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Gradient,
    Step,
    ExactFit,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NllsSolution {
    pub x: DVector<f64>,
    /// `½‖r(x)‖²`.
    pub cost: f64,
    pub residuals: DVector<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub stop: StopReason,
}

fn half_norm_sq(r: &DVector<f64>) -> f64 {
    0.5 * r.norm_squared()
}

fn check_bounds(x0: &DVector<f64>, lower: &DVector<f64>, upper: &DVector<f64>) -> Result<()> {
    let n = x0.len();
    if lower.len() != n || upper.len() != n {
        return Err(Error::InvalidBounds(format!("expected {n} bounds on each side")));
    }
    for i in 0..n {
        if lower[i].is_nan() || upper[i].is_nan() || lower[i] > upper[i] {
            return Err(Error::InvalidBounds(format!("empty interval for parameter {i}")));
        }
        if !(x0[i] >= lower[i] && x0[i] <= upper[i]) {
            return Err(Error::InvalidBounds(format!("start {} outside [{}, {}]", x0[i], lower[i], upper[i])));
        }
    }
    Ok(())
}

/// Variables not pinned at a bound by the gradient.
fn free_set(x: &DVector<f64>, g: &DVector<f64>, lower: &DVector<f64>, upper: &DVector<f64>) -> Vec<usize> {
    (0..x.len()).filter(|&i| !((x[i] <= lower[i] && g[i] > 0.0) || (x[i] >= upper[i] && g[i] < 0.0))).collect()
}

/// Damped Gauss-Newton step on the free variables with `‖D p‖ ≈ Δ` or less.
fn trust_region_step(jtj: &DMatrix<f64>, g: &DVector<f64>, d: &DVector<f64>, radius: f64) -> DVector<f64> {
    let n = g.len();
    let solve = |lambda: f64| -> Option<DVector<f64>> {
        let mut m = jtj.clone();
        for i in 0..n {
            m[(i, i)] += lambda * d[i] * d[i];
        }
        m.cholesky().map(|c| -c.solve(g))
    };
    let scaled_norm = |p: &DVector<f64>| p.component_mul(d).norm();

    if let Some(p) = solve(0.0) {
        if scaled_norm(&p) <= radius * 1.1 {
            return p;
        }
    }
    // ‖D p(λ)‖ ≤ ‖D⁻¹g‖ / λ, so this λ always lands inside the region
    let mut hi = g.component_div(d).norm() / radius;
    let mut lo = hi * 1e-14;
    let mut best = solve(hi).unwrap_or_else(|| {
        let dg = g.component_div(d);
        -dg.component_div(d) * (radius / dg.norm())
    });
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        let p = solve(mid);
        let len = p.as_ref().map_or(f64::INFINITY, &scaled_norm);
        if len > radius * 1.1 {
            lo = mid;
        } else if let Some(p) = p {
            best = p;
            if len >= radius * 0.9 {
                break;
            }
            hi = mid;
        }
    }
    best
}

/// Minimises `½‖r(x)‖²` subject to `lower ≤ x ≤ upper` starting from `x0`.
///
/// The cost never increases from one accepted iterate to the next.
pub fn solve_bounded_nlls<P: LeastSquaresProblem + ?Sized>(
    problem: &P,
    x0: DVector<f64>,
    lower: &DVector<f64>,
    upper: &DVector<f64>,
    opts: &NllsOptions,
) -> Result<NllsSolution> {
    check_bounds(&x0, lower, upper)?;
    let n = x0.len();
    let mut x = x0;
    let mut r = problem.residuals(&x);
    if r.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteResidual);
    }
    let mut cost = half_norm_sq(&r);
    let mut jac = problem.jacobian(&x);
    let mut d = DVector::from_fn(n, |i, _| {
        let c = jac.column(i).norm();
        if c > 0.0 {
            c
        } else {
            1.0
        }
    });
    let dx = x.component_mul(&d).norm();
    let mut radius = if dx > 0.0 { 100.0 * dx } else { 100.0 };

    let finish = |x, cost, residuals, iterations, stop| NllsSolution {
        x,
        cost,
        residuals,
        iterations,
        converged: stop != StopReason::IterationLimit,
        stop,
    };

    for iteration in 0..opts.max_iterations {
        if cost == 0.0 {
            return Ok(finish(x, cost, r, iteration, StopReason::ExactFit));
        }
        let g = jac.transpose() * &r;
        let free = free_set(&x, &g, lower, upper);
        let projected = free.iter().map(|&i| g[i].abs()).fold(0.0, f64::max);
        if projected <= opts.gradient_tol {
            return Ok(finish(x, cost, r, iteration, StopReason::Gradient));
        }

        let jf = jac.select_columns(&free);
        let gf = DVector::from_iterator(free.len(), free.iter().map(|&i| g[i]));
        let df = DVector::from_iterator(free.len(), free.iter().map(|&i| d[i]));
        let pf = trust_region_step(&(jf.transpose() * &jf), &gf, &df, radius);

        let mut reflected = x.clone();
        let mut alpha = 1.0f64;
        for (k, &i) in free.iter().enumerate() {
            let mut v = x[i] + pf[k];
            if v < lower[i] {
                alpha = alpha.min((lower[i] - x[i]) / pf[k]);
                v = lower[i] + (lower[i] - v);
            } else if v > upper[i] {
                alpha = alpha.min((upper[i] - x[i]) / pf[k]);
                v = upper[i] - (v - upper[i]);
            }
            reflected[i] = v.clamp(lower[i], upper[i]);
        }
        let mut truncated = x.clone();
        for (k, &i) in free.iter().enumerate() {
            truncated[i] = (x[i] + alpha * pf[k]).clamp(lower[i], upper[i]);
        }
        let model = |s: &DVector<f64>| g.dot(s) + 0.5 * (&jac * s).norm_squared();
        let (s_reflected, s_truncated) = (&reflected - &x, &truncated - &x);
        let (trial, step) =
            if model(&s_reflected) < model(&s_truncated) { (reflected, s_reflected) } else { (truncated, s_truncated) };
        if step.norm() <= opts.step_tol {
            return Ok(finish(x, cost, r, iteration + 1, StopReason::Step));
        }
        let scaled_step = step.component_mul(&d).norm();

        let r_trial = problem.residuals(&trial);
        if r_trial.iter().any(|v| !v.is_finite()) {
            radius = 0.25 * scaled_step;
            continue;
        }
        let cost_trial = half_norm_sq(&r_trial);
        let actual = cost - cost_trial;
        let predicted = -(g.dot(&step) + 0.5 * (&jac * &step).norm_squared());
        let ratio = if predicted > 0.0 {
            actual / predicted
        } else if actual > 0.0 {
            1.0
        } else {
            -1.0
        };

        if ratio < 0.25 {
            radius = 0.25 * scaled_step;
        } else if ratio > 0.75 {
            radius = radius.max(2.0 * scaled_step);
        }
        if ratio > 1e-4 && actual > 0.0 {
            x = trial;
            r = r_trial;
            cost = cost_trial;
            jac = problem.jacobian(&x);
            for i in 0..n {
                d[i] = d[i].max(jac.column(i).norm());
            }
        }
    }
    Ok(finish(x, cost, r, opts.max_iterations, StopReason::IterationLimit))
}

/// Jacobian of `f` by differences with step `h`, central where both probes
/// stay inside the bounds and one-sided otherwise.
pub fn finite_difference_jacobian(
    f: impl Fn(&DVector<f64>) -> DVector<f64>,
    x: &DVector<f64>,
    h: f64,
    lower: &DVector<f64>,
    upper: &DVector<f64>,
) -> DMatrix<f64> {
    let f0 = f(x);
    let mut jac = DMatrix::zeros(f0.len(), x.len());
    for i in 0..x.len() {
        let up = x[i] + h <= upper[i];
        let down = x[i] - h >= lower[i];
        let probe = |delta: f64| {
            let mut p = x.clone();
            p[i] += delta;
            f(&p)
        };
        let column = match (up, down) {
            (true, true) => (probe(h) - probe(-h)) / (2.0 * h),
            (true, false) => (probe(h) - &f0) / h,
            (false, true) => (&f0 - probe(-h)) / h,
            (false, false) => continue,
        };
        jac.set_column(i, &column);
    }
    jac
}
