//! Instance generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use fuzzy_time::model::{FuzzySkill, FuzzyTask, SamplingGrid, Trapezoid};
use fuzzy_time::sched::SolverConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random task with `n` trapezoidal skills on a 30-point grid over 10 minutes.
pub fn random_instance(seed: u64, n: usize) -> (FuzzyTask, SolverConfig) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = SamplingGrid::with_period(0.0, 600.0, 20.0).unwrap();
    let skills = (0..n)
        .map(|i| {
            let center: f64 = rng.random_range(0.0..600.0);
            let half_plateau: f64 = rng.random_range(0.0..60.0);
            let left = rng.random_range(10.0..200.0);
            let right = rng.random_range(10.0..200.0);
            let b = (center - half_plateau).max(0.0);
            let a = (b - left).max(0.0);
            let c = center + half_plateau;
            let psi = Trapezoid::new(a, b, c, c + right).unwrap();
            let duration = rng.random_range(20.0..150.0);
            FuzzySkill::new(format!("s{i}"), psi, duration).unwrap()
        })
        .collect();
    (FuzzyTask::new(skills).unwrap(), SolverConfig::new(grid).with_seed(seed))
}

/// Enumerates every grid start vector with nested index decoding, an explicit
/// sort and an explicit product. Returns the first maximiser in
/// lexicographic index order.
pub fn brute_force(task: &FuzzyTask, cfg: &SolverConfig) -> (Vec<usize>, f64) {
    let k = cfg.grid.len();
    let n = task.len();
    let total = k.pow(n as u32);
    let mut best: (Vec<usize>, f64) = (vec![], -1.0);
    for code in 0..total {
        // most significant digit first, so codes run lexicographically
        let mut idx = vec![0; n];
        let mut rest = code;
        for pos in (0..n).rev() {
            idx[pos] = rest % k;
            rest /= k;
        }
        let mut spans: Vec<(f64, f64)> =
            idx.iter().zip(task.skills()).map(|(&j, s)| (cfg.grid.time(j), cfg.grid.time(j) + s.duration)).collect();
        spans.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let ok = spans.windows(2).all(|w| w[0].1 <= w[1].0);
        let value = if ok {
            let mut p = 1.0;
            for (&j, s) in idx.iter().zip(task.skills()) {
                let v = s.psi.eval(cfg.grid.time(j));
                p *= if v < cfg.epsilon { cfg.epsilon } else { v };
            }
            p
        } else {
            0.0
        };
        if value > best.1 {
            best = (idx, value);
        }
    }
    best
}

/// Grid indices of a schedule's start times.
pub fn indices(cfg: &SolverConfig, starts: &[f64]) -> Vec<usize> {
    starts.iter().map(|&t| cfg.grid.nearest_index(t)).collect()
}

/// Pairwise overlap check written without sorting.
pub fn pairwise_disjoint(starts: &[f64], durations: &[f64]) -> bool {
    for i in 0..starts.len() {
        for j in i + 1..starts.len() {
            let (a0, a1) = (starts[i], starts[i] + durations[i]);
            let (b0, b1) = (starts[j], starts[j] + durations[j]);
            if a0 < b1 && b0 < a1 {
                return false;
            }
        }
    }
    true
}

/// Exact two-sided Mann-Whitney p-value by enumerating every subset of the
/// pooled sample as a bitmask, with U counted pairwise (ties count ½).
pub fn mwu_oracle(a: &[f64], b: &[f64]) -> (f64, f64) {
    let u_of = |x: &[f64], y: &[f64]| -> f64 {
        let mut u = 0.0;
        for &xi in x {
            for &yj in y {
                if xi > yj {
                    u += 1.0;
                } else if xi == yj {
                    u += 0.5;
                }
            }
        }
        u
    };
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len();
    let mean = (a.len() * b.len()) as f64 / 2.0;
    let observed = u_of(a, b);
    let (mut extreme, mut total) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != a.len() {
            continue;
        }
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (i, &v) in pooled.iter().enumerate() {
            if mask & (1 << i) != 0 {
                x.push(v)
            } else {
                y.push(v)
            }
        }
        total += 1;
        if (u_of(&x, &y) - mean).abs() >= (observed - mean).abs() - 1e-9 {
            extreme += 1;
        }
    }
    (observed, extreme as f64 / total as f64)
}

pub const IN_TAGS_BY_TIME: [(&str, f64); 4] =
    [("in_now", 0.0), ("in_1min", 60.0), ("in_10min", 600.0), ("in_30min", 1800.0)];
