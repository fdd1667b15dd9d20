//! Point-wise statistics over ensembles of sampled satisfaction functions,
//! density variance, and the Mann-Whitney U test.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::model::{SampledFunction, SamplingGrid};

/// Per-user satisfaction functions for one instruction, on a shared grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatisfactionEnsemble {
    grid: SamplingGrid,
    members: Vec<SampledFunction>,
    instruction_tag: String,
}

impl SatisfactionEnsemble {
    pub fn new(instruction_tag: impl Into<String>, members: Vec<SampledFunction>) -> Result<Self> {
        let grid = members.first().ok_or(Error::EmptyEnsemble)?.grid().clone();
        if members.iter().any(|m| m.grid() != &grid) {
            return Err(Error::GridMismatch);
        }
        Ok(SatisfactionEnsemble { grid, members, instruction_tag: instruction_tag.into() })
    }

    pub fn grid(&self) -> &SamplingGrid {
        &self.grid
    }

    pub fn members(&self) -> &[SampledFunction] {
        &self.members
    }

    pub fn instruction_tag(&self) -> &str {
        &self.instruction_tag
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Applies `stat` to the members' values at every grid step. Steps are
    /// independent, so they are evaluated in parallel.
    fn per_step(&self, stat: impl Fn(&mut [f64]) -> f64 + Sync) -> SampledFunction {
        let values = (0..self.grid.len())
            .into_par_iter()
            .map(|j| {
                let mut column: Vec<f64> = self.members.iter().map(|m| m.values()[j]).collect();
                stat(&mut column)
            })
            .collect();
        SampledFunction::clipped(self.grid.clone(), values).expect("statistics stay on the ensemble grid")
    }
}

/// Arithmetic mean of the members at each grid step.
pub fn pointwise_mean(e: &SatisfactionEnsemble) -> SampledFunction {
    e.per_step(|col| col.iter().sum::<f64>() / col.len() as f64)
}

/// Quantile of sorted data, interpolating linearly between the order
/// statistics at positions `floor(h)` and `ceil(h)` for `h = (n - 1) q`.
fn sorted_quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn sort(col: &mut [f64]) {
    col.sort_by(f64::total_cmp);
}

/// Point-wise quantile at level `q` in (0, 1), linear between order statistics.
pub fn pointwise_quantile(e: &SatisfactionEnsemble, q: f64) -> Result<SampledFunction> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidQuantile(q));
    }
    Ok(e.per_step(|col| {
        sort(col);
        sorted_quantile(col, q)
    }))
}

/// Point-wise median; for even ensembles the two central values are averaged.
pub fn pointwise_median(e: &SatisfactionEnsemble) -> SampledFunction {
    pointwise_quantile(e, 0.5).expect("0.5 is a valid level")
}

pub fn pointwise_min(e: &SatisfactionEnsemble) -> SampledFunction {
    e.per_step(|col| col.iter().copied().fold(f64::INFINITY, f64::min))
}

pub fn pointwise_max(e: &SatisfactionEnsemble) -> SampledFunction {
    e.per_step(|col| col.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

/// Population variance of the members at each grid step.
pub fn pointwise_variance(e: &SatisfactionEnsemble) -> Vec<f64> {
    (0..e.grid.len())
        .map(|j| {
            let n = e.members.len() as f64;
            let mean = e.members.iter().map(|m| m.values()[j]).sum::<f64>() / n;
            e.members.iter().map(|m| (m.values()[j] - mean).powi(2)).sum::<f64>() / n
        })
        .collect()
}

pub const DEFAULT_MODE_BIN_WIDTH: f64 = 0.05;

/// Most populated bin at one step: index and whether another bin tied it.
fn mode_bin(col: &[f64], width: f64, bins: usize) -> (usize, bool) {
    let mut counts = vec![0usize; bins];
    for &v in col {
        // snap values sitting on a bin edge up to that edge despite rounding
        let i = ((v / width) + 1e-9).floor().max(0.0) as usize;
        counts[i.min(bins - 1)] += 1;
    }
    let top = *counts.iter().max().expect("at least one bin");
    let first = counts.iter().position(|&c| c == top).expect("max exists");
    let tied = counts.iter().filter(|&&c| c == top).count() > 1;
    (first, tied)
}

fn check_bin_width(width: f64) -> Result<usize> {
    if !(width > 0.0 && width <= 1.0) {
        return Err(Error::InvalidBinWidth(width));
    }
    Ok(((1.0 / width) - 1e-9).ceil().max(1.0) as usize)
}

/// Point-wise mode: values are binned into `ceil(1 / bin_width)` bins over
/// `[0, 1]` and the centre of the most populated bin is returned, the lowest
/// one on ties.
pub fn pointwise_mode(e: &SatisfactionEnsemble, bin_width: f64) -> Result<SampledFunction> {
    let bins = check_bin_width(bin_width)?;
    Ok(e.per_step(|col| (mode_bin(col, bin_width, bins).0 as f64 + 0.5) * bin_width))
}

/// Grid steps at which the mode had to be chosen among tied bins.
pub fn mode_ties(e: &SatisfactionEnsemble, bin_width: f64) -> Result<Vec<usize>> {
    let bins = check_bin_width(bin_width)?;
    Ok((0..e.grid.len())
        .filter(|&j| {
            let col: Vec<f64> = e.members.iter().map(|m| m.values()[j]).collect();
            mode_bin(&col, bin_width, bins).1
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub instruction_tag: String,
    pub members: usize,
    pub mean: SampledFunction,
    pub median: SampledFunction,
    pub mode: SampledFunction,
    pub mode_ties: Vec<usize>,
    /// `(level, quantile function)` in increasing level order.
    pub quantiles: Vec<(f64, SampledFunction)>,
    pub min: SampledFunction,
    pub max: SampledFunction,
    pub pointwise_variance: Vec<f64>,
}

impl EnsembleSummary {
    pub fn quantile(&self, q: f64) -> Option<&SampledFunction> {
        self.quantiles.iter().find(|(level, _)| *level == q).map(|(_, f)| f)
    }
}

/// All point-wise statistics of an ensemble.
pub fn summarize(e: &SatisfactionEnsemble, levels: &[f64], bin_width: f64) -> Result<EnsembleSummary> {
    let mut levels = levels.to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let quantiles = levels.iter().map(|&q| pointwise_quantile(e, q).map(|f| (q, f))).collect::<Result<Vec<_>>>()?;
    Ok(EnsembleSummary {
        instruction_tag: e.instruction_tag.clone(),
        members: e.len(),
        mean: pointwise_mean(e),
        median: pointwise_median(e),
        mode: pointwise_mode(e, bin_width)?,
        mode_ties: mode_ties(e, bin_width)?,
        quantiles,
        min: pointwise_min(e),
        max: pointwise_max(e),
        pointwise_variance: pointwise_variance(e),
    })
}

fn density_weights(f: &SampledFunction) -> Result<(Vec<f64>, f64)> {
    let mass: f64 = f.values().iter().sum();
    if mass <= 0.0 {
        return Err(Error::ZeroMass);
    }
    Ok((f.grid().times().collect(), mass))
}

/// Mean of time under the density proportional to `f`.
pub fn density_mean(f: &SampledFunction) -> Result<f64> {
    let (times, mass) = density_weights(f)?;
    Ok(times.iter().zip(f.values()).map(|(t, v)| t * v).sum::<f64>() / mass)
}

/// Variance of time (in s²) under the density proportional to `f`.
pub fn density_variance(f: &SampledFunction) -> Result<f64> {
    let (times, mass) = density_weights(f)?;
    let mean = density_mean(f)?;
    Ok(times.iter().zip(f.values()).map(|(t, v)| (t - mean).powi(2) * v).sum::<f64>() / mass)
}

/// Result of a two-sided Mann-Whitney U test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MannWhitney {
    /// U statistic of the first sample.
    pub u: f64,
    pub p: f64,
    /// Whether `p` comes from the exact permutation distribution.
    pub exact: bool,
}

/// Largest pooled sample size for which the exact permutation p-value is used.
pub const MWU_EXACT_LIMIT: usize = 12;

/// Ranks of the pooled values, doubled so that midranks are integers.
fn doubled_midranks(pooled: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
    let mut ranks = vec![0u64; pooled.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && pooled[order[end]] == pooled[order[start]] {
            end += 1;
        }
        // ranks start+1 ..= end share their average (start + 1 + end) / 2
        for &i in &order[start..end] {
            ranks[i] = (start + 1 + end) as u64;
        }
        start = end;
    }
    ranks
}

/// Calls `visit` with every `size`-subset of `0..n` in lexicographic order.
fn for_each_combination(n: usize, size: usize, mut visit: impl FnMut(&[usize])) {
    let mut comb: Vec<usize> = (0..size).collect();
    loop {
        visit(&comb);
        let Some(i) = (0..size).rev().find(|&i| comb[i] < n - size + i) else {
            return;
        };
        comb[i] += 1;
        for j in i + 1..size {
            comb[j] = comb[j - 1] + 1;
        }
    }
}

/// Two-sided Mann-Whitney U test with midranks for ties.
///
/// When the pooled size is at most [`MWU_EXACT_LIMIT`] the p-value is the
/// exact share of group assignments whose U lies at least as far from its
/// mean as the observed one. Otherwise the normal approximation with tie
/// correction and continuity correction is used.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let (na, nb) = (a.len(), b.len());
    let n = na + nb;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = doubled_midranks(&pooled);
    // 2U = 2R - na (na + 1)
    let offset = (na * (na + 1)) as i64;
    let doubled_u = |members: &mut dyn Iterator<Item = usize>| members.map(|i| ranks[i] as i64).sum::<i64>() - offset;
    let u2 = doubled_u(&mut (0..na));
    let u = u2 as f64 / 2.0;
    // doubled mean of U is na * nb
    let mean2 = (na * nb) as i64;

    if n <= MWU_EXACT_LIMIT {
        let observed = (u2 - mean2).abs();
        let mut extreme = 0u64;
        let mut total = 0u64;
        for_each_combination(n, na, |comb| {
            total += 1;
            if (doubled_u(&mut comb.iter().copied()) - mean2).abs() >= observed {
                extreme += 1;
            }
        });
        return Ok(MannWhitney { u, p: extreme as f64 / total as f64, exact: true });
    }

    let (naf, nbf, nf) = (na as f64, nb as f64, n as f64);
    let mut sorted = pooled.clone();
    sort(&mut sorted);
    let mut tie_term = 0.0;
    for group in sorted.chunk_by(|x, y| x == y) {
        let t = group.len() as f64;
        tie_term += t * t * t - t;
    }
    let var = naf * nbf / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
    let p = if var <= 0.0 {
        1.0
    } else {
        let z = ((u - naf * nbf / 2.0).abs() - 0.5).max(0.0) / var.sqrt();
        erfc(z / std::f64::consts::SQRT_2).min(1.0)
    };
    Ok(MannWhitney { u, p, exact: false })
}
