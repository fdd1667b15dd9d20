//! Trapezoid and bell fits to sampled satisfaction functions.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{trapezoid_value, Bell, SampledFunction, SamplingGrid, SatisfactionFunction, Trapezoid};
use crate::nlls::{finite_difference_jacobian, solve_bounded_nlls, LeastSquaresProblem, NllsOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Trapezoid,
    Bell,
}

/// A fitted model with its RMSE over the target grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: ModelKind,
    /// `[a, b, c, d]` for trapezoids, `[mu, sigma]` for bells.
    pub params: Vec<f64>,
    pub error: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl FitResult {
    pub fn function(&self) -> SatisfactionFunction {
        match self.model {
            ModelKind::Trapezoid => {
                let p = &self.params;
                Trapezoid::new(p[0], p[1], p[2], p[3]).expect("fitted corners are ordered").into()
            }
            ModelKind::Bell => Bell::new(self.params[0], self.params[1]).expect("fitted width is positive").into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub seed: u64,
    /// Jittered starts in addition to the data-derived one.
    pub jittered_starts: usize,
    pub solver: NllsOptions,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig { seed: 0, jittered_starts: 4, solver: NllsOptions::default() }
    }
}

/// Root mean square difference between `f` and `target` over the grid.
pub fn rmse(f: &SatisfactionFunction, target: &SampledFunction) -> f64 {
    let grid = target.grid();
    let sum: f64 = grid.times().zip(target.values()).map(|(t, y)| (f.eval(t) - y).powi(2)).sum();
    (sum / grid.len() as f64).sqrt()
}

struct Target<'a> {
    times: Vec<f64>,
    values: &'a [f64],
    lower: DVector<f64>,
    upper: DVector<f64>,
}

impl<'a> Target<'a> {
    fn new(target: &'a SampledFunction, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        Target {
            times: target.grid().times().collect(),
            values: target.values(),
            lower: DVector::from_vec(lower),
            upper: DVector::from_vec(upper),
        }
    }

    fn clamp(&self, x: Vec<f64>) -> DVector<f64> {
        DVector::from_iterator(x.len(), x.iter().enumerate().map(|(i, v)| v.clamp(self.lower[i], self.upper[i])))
    }
}

/// Trapezoid as `(a, Δ₁, Δ₂, Δ₃)` so that box bounds keep the corners ordered.
struct TrapezoidProblem<'a> {
    target: Target<'a>,
    fd_step: f64,
}

fn corners(x: &DVector<f64>) -> [f64; 4] {
    let b = x[0] + x[1];
    let c = b + x[2];
    [x[0], b, c, c + x[3]]
}

fn widths(c: [f64; 4]) -> Vec<f64> {
    vec![c[0], c[1] - c[0], c[2] - c[1], c[3] - c[2]]
}

impl LeastSquaresProblem for TrapezoidProblem<'_> {
    fn residuals(&self, x: &DVector<f64>) -> DVector<f64> {
        let [a, b, c, d] = corners(x);
        let t = &self.target;
        DVector::from_iterator(
            t.times.len(),
            t.times.iter().zip(t.values).map(|(&s, y)| trapezoid_value(a, b, c, d, s) - y),
        )
    }

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        finite_difference_jacobian(|p| self.residuals(p), x, self.fd_step, &self.target.lower, &self.target.upper)
    }
}

struct BellProblem<'a> {
    target: Target<'a>,
}

impl LeastSquaresProblem for BellProblem<'_> {
    fn residuals(&self, x: &DVector<f64>) -> DVector<f64> {
        let t = &self.target;
        DVector::from_iterator(
            t.times.len(),
            t.times.iter().zip(t.values).map(|(&s, y)| (-(s - x[0]).powi(2) / (2.0 * x[1] * x[1])).exp() - y),
        )
    }

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let (mu, sigma) = (x[0], x[1]);
        let times = &self.target.times;
        DMatrix::from_fn(times.len(), 2, |j, i| {
            let u = times[j] - mu;
            let e = (-u * u / (2.0 * sigma * sigma)).exp();
            if i == 0 {
                e * u / (sigma * sigma)
            } else {
                e * u * u / (sigma * sigma * sigma)
            }
        })
    }
}

fn check_target(target: &SampledFunction) -> Result<f64> {
    let max = target.values().iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Err(Error::AllZeroTarget);
    }
    Ok(max)
}

fn first_last(grid: &SamplingGrid, values: &[f64], pred: impl Fn(f64) -> bool) -> (usize, usize) {
    let first = values.iter().position(|&v| pred(v)).unwrap_or(0);
    let last = values.iter().rposition(|&v| pred(v)).unwrap_or(grid.len() - 1);
    (first, last)
}

/// Runs the solver from every start in parallel and keeps the lowest cost,
/// the earliest start on ties.
fn multi_start<P: LeastSquaresProblem + Sync>(
    problem: &P,
    target: &Target,
    starts: Vec<DVector<f64>>,
    opts: &NllsOptions,
) -> Result<(DVector<f64>, f64, usize, bool)> {
    let runs = starts
        .into_par_iter()
        .map(|x0| solve_bounded_nlls(problem, x0, &target.lower, &target.upper, opts))
        .collect::<Result<Vec<_>>>()?;
    let best =
        runs.into_iter().reduce(|best, run| if run.cost < best.cost { run } else { best }).expect("at least one start");
    let rmse = (2.0 * best.cost / target.times.len() as f64).sqrt();
    Ok((best.x, rmse, best.iterations, best.converged))
}

/// Fits `Trapezoid(a, b, c, d)` by bounded least squares from a data-derived
/// start and `cfg.jittered_starts` seeded perturbations of it.
pub fn fit_trapezoid(target: &SampledFunction, cfg: &FitConfig) -> Result<FitResult> {
    let max = check_target(target)?;
    let grid = target.grid();
    let (period, span) = (grid.period(), grid.span());
    let values = target.values();

    let (top_first, top_last) = first_last(grid, values, |v| v >= 0.9 * max);
    let (nz_first, nz_last) = first_last(grid, values, |v| v > 0.0);
    let a = grid.time(nz_first.saturating_sub(1));
    let d = grid.time((nz_last + 1).min(grid.len() - 1));
    let base = [a, grid.time(top_first), grid.time(top_last), d];

    let lower = vec![(grid.start() - span).max(0.0), 0.0, 0.0, 0.0];
    let upper = vec![grid.end(), span, span, span];
    let problem = TrapezoidProblem { target: Target::new(target, lower, upper), fd_step: period / 2.0 };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let jitter = Normal::new(0.0, (0.25 * (base[3] - base[0])).max(period)).expect("positive deviation");
    let mut starts = vec![problem.target.clamp(widths(base))];
    for _ in 0..cfg.jittered_starts {
        let mut c = base.map(|v| (v + jitter.sample(&mut rng)).max(0.0));
        c.sort_by(f64::total_cmp);
        starts.push(problem.target.clamp(widths(c)));
    }

    let (x, error, iterations, converged) = multi_start(&problem, &problem.target, starts, &cfg.solver)?;
    Ok(FitResult { model: ModelKind::Trapezoid, params: corners(&x).to_vec(), error, iterations, converged })
}

/// Fits a unit-amplitude `Bell(mu, sigma)` with `mu` inside the grid span and
/// `sigma` between one grid step and the span.
pub fn fit_bell(target: &SampledFunction, cfg: &FitConfig) -> Result<FitResult> {
    let max = check_target(target)?;
    let grid = target.grid();
    let (period, span) = (grid.period(), grid.span());
    let values = target.values();

    let peak = values.iter().position(|&v| v == max).expect("max is attained");
    let (half_first, half_last) = first_last(grid, values, |v| v >= 0.5 * max);
    let base = [grid.time(peak), (grid.time(half_last) - grid.time(half_first)) / 2.0];

    let lower = vec![grid.start(), period];
    let upper = vec![grid.end(), span];
    let problem = BellProblem { target: Target::new(target, lower, upper) };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let shift = Normal::new(0.0, base[1].max(period)).expect("positive deviation");
    let spread = Normal::<f64>::new(0.0, 0.3).expect("positive deviation");
    let mut starts = vec![problem.target.clamp(base.to_vec())];
    for _ in 0..cfg.jittered_starts {
        let mu = base[0] + shift.sample(&mut rng);
        let sigma = base[1].max(period) * spread.sample(&mut rng).exp();
        starts.push(problem.target.clamp(vec![mu, sigma]));
    }

    let (x, error, iterations, converged) = multi_start(&problem, &problem.target, starts, &cfg.solver)?;
    Ok(FitResult { model: ModelKind::Bell, params: vec![x[0], x[1]], error, iterations, converged })
}

/// Fits both models and returns the one with lower error, the trapezoid on ties.
pub fn best_fit(target: &SampledFunction, cfg: &FitConfig) -> Result<FitResult> {
    let trapezoid = fit_trapezoid(target, cfg)?;
    let bell = fit_bell(target, cfg)?;
    Ok(if bell.error < trapezoid.error { bell } else { trapezoid })
}
