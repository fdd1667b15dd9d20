//! Satisfaction-maximizing start times for fuzzy tasks.
//!
//! A schedule assigns each skill a start time. Its objective is the product
//! of the skills' satisfactions, each floored at `epsilon` so that a single
//! unsatisfiable skill does not flatten the whole search landscape. Skill
//! executions must not overlap: after sorting by start time, every skill has
//! to end no later than the next one starts. Touching intervals are allowed.
//!
//! All solvers restrict start times to the points of a [`SamplingGrid`]. Ties
//! are broken towards the lexicographically smallest vector of grid indices,
//! with coordinates ordered by skill id.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FuzzyTask, SamplingGrid, SkillId, SpecificSkill, TimePoint};

/// Start times for every skill of a task together with their evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    /// One entry per skill, ordered by skill id.
    pub starts: Vec<(SkillId, TimePoint)>,
    pub objective: f64,
    pub feasible: bool,
    /// Skills whose raw satisfaction lies below the epsilon floor.
    pub below_threshold: BTreeSet<SkillId>,
}

impl Schedule {
    pub fn start_of(&self, id: &SkillId) -> Option<TimePoint> {
        self.starts.iter().find(|(s, _)| s == id).map(|(_, t)| *t)
    }

    pub fn start_times(&self) -> Vec<f64> {
        self.starts.iter().map(|(_, t)| t.seconds()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub grid: SamplingGrid,
    pub epsilon: f64,
    pub seed: u64,
    /// Initial states for hill climbing and annealing chains; the first is
    /// the greedy packing, the rest are seeded random feasible vectors.
    pub restarts: usize,
    pub sa_initial_temp: f64,
    pub sa_cooling: f64,
    pub sa_iters_per_temp: usize,
    pub sa_min_temp: f64,
    /// Largest move of a single annealing proposal, in grid steps.
    pub sa_step_window: usize,
    /// Upper bound on the number of candidates exhaustive search may visit.
    pub max_candidates: u64,
}

impl SolverConfig {
    pub fn new(grid: SamplingGrid) -> Self {
        SolverConfig {
            grid,
            epsilon: 1e-6,
            seed: 0,
            restarts: 20,
            sa_initial_temp: 1.0,
            sa_cooling: 0.95,
            sa_iters_per_temp: 50,
            sa_min_temp: 1e-4,
            sa_step_window: 5,
            max_candidates: 10_000_000,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_owned()));
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad("epsilon must lie in (0, 1)");
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1");
        }
        if !(self.sa_initial_temp.is_finite() && self.sa_initial_temp > 0.0) {
            return bad("sa_initial_temp must be positive");
        }
        if !(self.sa_min_temp.is_finite() && self.sa_min_temp > 0.0) {
            return bad("sa_min_temp must be positive");
        }
        if !(self.sa_cooling > 0.0 && self.sa_cooling < 1.0) {
            return bad("sa_cooling must lie in (0, 1)");
        }
        if self.sa_step_window == 0 {
            return bad("sa_step_window must be at least 1");
        }
        Ok(())
    }
}

/// True iff no two executions overlap once sorted by start time.
///
/// # Panics
///
/// Panics if `starts` and `durations` differ in length.
pub fn check_no_overlap(starts: &[f64], durations: &[f64]) -> bool {
    assert_eq!(starts.len(), durations.len(), "one duration per start time");
    let mut order: Vec<usize> = (0..starts.len()).collect();
    order.sort_by(|&i, &j| starts[i].total_cmp(&starts[j]).then(i.cmp(&j)));
    order.windows(2).all(|w| starts[w[0]] + durations[w[0]] <= starts[w[1]])
}

/// Product of the epsilon-floored satisfactions, or 0 when executions overlap.
/// `starts` follows the task's skill order.
pub fn objective(task: &FuzzyTask, starts: &[f64], epsilon: f64) -> Result<f64> {
    evaluate(task, starts, epsilon).map(|s| s.objective)
}

/// Evaluates a start vector (in the task's skill order) into a [`Schedule`].
pub fn evaluate(task: &FuzzyTask, starts: &[f64], epsilon: f64) -> Result<Schedule> {
    if starts.len() != task.len() {
        return Err(Error::LengthMismatch { expected: task.len(), got: starts.len() });
    }
    let feasible = check_no_overlap(starts, &task.durations());
    let mut product = 1.0;
    let mut below = BTreeSet::new();
    let mut timed = Vec::with_capacity(starts.len());
    for (skill, &t) in task.skills().iter().zip(starts) {
        let raw = skill.psi.eval(t);
        if raw < epsilon {
            below.insert(skill.id.clone());
        }
        product *= raw.max(epsilon);
        timed.push((skill.id.clone(), TimePoint::new(t)?));
    }
    Ok(Schedule { starts: timed, objective: if feasible { product } else { 0.0 }, feasible, below_threshold: below })
}

/// Projects fuzzy skills onto specific skills using the schedule's start
/// times. Fuzzy parameters are passed through and flagged as unresolved.
pub fn to_specific(task: &FuzzyTask, schedule: &Schedule) -> Result<Vec<SpecificSkill>> {
    if !schedule.feasible {
        return Err(Error::InfeasibleSchedule);
    }
    task.skills()
        .iter()
        .map(|skill| {
            let start = schedule
                .start_of(&skill.id)
                .ok_or_else(|| Error::InvalidTask(format!("schedule has no start for {}", skill.id)))?;
            let mut params = skill.specific_params.clone();
            let mut unresolved = BTreeSet::new();
            for (k, v) in &skill.fuzzy_params {
                if !params.contains_key(k) {
                    params.insert(k.clone(), v.clone());
                    unresolved.insert(k.clone());
                }
            }
            let mut out = SpecificSkill::new(skill.id.clone(), start, skill.duration, params)?;
            out.unresolved = unresolved;
            Ok(out)
        })
        .collect()
}

/// Task evaluated on a grid: satisfaction tables indexed by grid step.
struct GridProblem<'a> {
    task: &'a FuzzyTask,
    cfg: &'a SolverConfig,
    times: Vec<f64>,
    /// `floored[i][j]` = max(psi_i(t_j), epsilon)
    floored: Vec<Vec<f64>>,
    durations: Vec<f64>,
}

impl<'a> GridProblem<'a> {
    fn new(task: &'a FuzzyTask, cfg: &'a SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = &cfg.grid;
        let total: f64 = task.durations().iter().sum();
        if total > grid.span() {
            return Err(Error::NoFeasibleSchedule(format!(
                "total duration {total} s exceeds the planning interval of {} s",
                grid.span()
            )));
        }
        let times: Vec<f64> = grid.times().collect();
        let floored =
            task.skills().iter().map(|s| times.iter().map(|&t| s.psi.eval(t).max(cfg.epsilon)).collect()).collect();
        Ok(GridProblem { task, cfg, times, floored, durations: task.durations() })
    }

    fn k(&self) -> usize {
        self.times.len()
    }

    fn n(&self) -> usize {
        self.durations.len()
    }

    fn feasible(&self, idx: &[usize]) -> bool {
        let mut order: Vec<usize> = (0..idx.len()).collect();
        order.sort_by_key(|&i| (idx[i], i));
        order.windows(2).all(|w| self.times[idx[w[0]]] + self.durations[w[0]] <= self.times[idx[w[1]]])
    }

    fn objective(&self, idx: &[usize]) -> f64 {
        if !self.feasible(idx) {
            return 0.0;
        }
        idx.iter().enumerate().map(|(i, &j)| self.floored[i][j]).product()
    }

    fn schedule(&self, idx: &[usize]) -> Result<Schedule> {
        let starts: Vec<f64> = idx.iter().map(|&j| self.times[j]).collect();
        evaluate(self.task, &starts, self.cfg.epsilon)
    }

    /// Smallest number of grid steps `s` such that a skill starting at any
    /// grid point ends no later than `s` steps further on.
    fn steps_for(&self, duration: f64) -> usize {
        let period = self.cfg.grid.period();
        let mut s = (duration / period).ceil().max(1.0) as usize;
        while (0..self.k().saturating_sub(s)).any(|j| self.times[j] + duration > self.times[j + s]) {
            s += 1;
        }
        s
    }

    fn argmax(&self, skill: usize) -> usize {
        let row = &self.floored[skill];
        let mut best = 0;
        for (j, &v) in row.iter().enumerate() {
            if v > row[best] {
                best = j;
            }
        }
        best
    }

    /// Packs skills in order, each as early as possible at or after `earliest`.
    fn pack(&self, order: &[usize], earliest: impl Fn(usize) -> usize) -> Option<Vec<usize>> {
        let mut idx = vec![0; self.n()];
        let mut prev_end = f64::NEG_INFINITY;
        for &i in order {
            let j = (earliest(i)..self.k()).find(|&j| self.times[j] >= prev_end)?;
            idx[i] = j;
            prev_end = self.times[j] + self.durations[i];
        }
        Some(idx)
    }

    /// Earliest packing in every skill order while there are at most
    /// [`PACK_ORDER_LIMIT`] skills, else in order of decreasing duration.
    fn pack_any_order(&self) -> Option<Vec<usize>> {
        let mut order: Vec<usize> = (0..self.n()).collect();
        if self.n() > PACK_ORDER_LIMIT {
            order.sort_by(|&x, &y| self.durations[y].total_cmp(&self.durations[x]).then(x.cmp(&y)));
            return self.pack(&order, |_| 0);
        }
        loop {
            if let Some(idx) = self.pack(&order, |_| 0) {
                return Some(idx);
            }
            if !next_permutation(&mut order) {
                return None;
            }
        }
    }

    /// Skills sorted by the grid argmax of their satisfaction (ties by id),
    /// each pushed to the later of its argmax and the previous skill's end.
    fn greedy(&self) -> Result<Vec<usize>> {
        let argmax: Vec<usize> = (0..self.n()).map(|i| self.argmax(i)).collect();
        let mut order: Vec<usize> = (0..self.n()).collect();
        order.sort_by_key(|&i| (argmax[i], i));
        self.pack(&order, |i| argmax[i])
            .or_else(|| self.pack(&order, |_| 0))
            .or_else(|| self.pack_any_order())
            .ok_or_else(|| Error::NoFeasibleSchedule("skills do not fit on the grid".into()))
    }

    /// Random feasible vector: skills in a random order, each started at a
    /// grid point after its predecessor ends, drawn with probability
    /// proportional to its floored satisfaction there.
    fn random_feasible(&self, order: &[usize], rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
        let steps: Vec<usize> = self.durations.iter().map(|&d| self.steps_for(d)).collect();
        for _ in 0..32 {
            let mut idx = vec![0; self.n()];
            let mut earliest = 0;
            let mut ok = true;
            for (pos, &i) in order.iter().enumerate() {
                let reserve: usize = order[pos..order.len() - 1].iter().map(|&r| steps[r]).sum();
                let Some(latest) = (self.k() - 1).checked_sub(reserve).filter(|&l| l >= earliest) else {
                    ok = false;
                    break;
                };
                let weights = &self.floored[i][earliest..=latest];
                idx[i] = earliest + WeightedIndex::new(weights).ok()?.sample(rng);
                earliest = idx[i] + steps[i];
            }
            if ok && self.feasible(&idx) {
                return Some(idx);
            }
        }
        None
    }

    /// Greedy packing followed by `restarts - 1` random feasible vectors.
    fn initial_states(&self, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<usize>>> {
        let mut states = vec![self.greedy()?];
        // cycle through all skill orders in random sequence while they are few
        let mut orders = Vec::new();
        if self.n() <= 5 {
            let mut order: Vec<usize> = (0..self.n()).collect();
            loop {
                orders.push(order.clone());
                if !next_permutation(&mut order) {
                    break;
                }
            }
            orders.shuffle(rng);
        }
        let mut order: Vec<usize> = (0..self.n()).collect();
        for r in 1..self.cfg.restarts {
            if orders.is_empty() {
                order.shuffle(rng);
            } else {
                order.clone_from(&orders[(r - 1) % orders.len()]);
            }
            if let Some(s) = self.random_feasible(&order, rng) {
                states.push(s);
            }
        }
        Ok(states)
    }

    /// Best improving single-skill move of one grid step under [`better`], if any.
    fn best_neighbor(&self, idx: &[usize], current: f64) -> Option<(Vec<usize>, f64)> {
        let mut best: Option<(Vec<usize>, f64)> = None;
        for i in 0..self.n() {
            for up in [false, true] {
                let j = if up { idx[i] + 1 } else { idx[i].wrapping_sub(1) };
                if j >= self.k() {
                    continue;
                }
                let mut cand = idx.to_vec();
                cand[i] = j;
                let value = self.objective(&cand);
                let improves = match &best {
                    Some((b, bv)) => better((&cand, value), (b, *bv)),
                    None => better((&cand, value), (idx, current)),
                };
                if improves {
                    best = Some((cand, value));
                }
            }
        }
        best
    }

    fn hill_climb_from(&self, mut idx: Vec<usize>) -> (Vec<usize>, f64) {
        let mut value = self.objective(&idx);
        while let Some((next, v)) = self.best_neighbor(&idx, value) {
            idx = next;
            value = v;
        }
        (idx, value)
    }
}

const PACK_ORDER_LIMIT: usize = 8;

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot has a successor");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Prefers higher objective, then the lexicographically smaller vector.
fn better(a: (&[usize], f64), b: (&[usize], f64)) -> bool {
    match a.1.partial_cmp(&b.1) {
        Some(Ordering::Greater) => true,
        Some(Ordering::Less) => false,
        _ => a.0 < b.0,
    }
}

/// Global maximizer over all grid start vectors.
///
/// Fails with [`Error::SearchSpaceTooLarge`] when `k^n` exceeds
/// `cfg.max_candidates`. The outermost coordinate is searched in parallel;
/// the reduction keeps the sequential tie-breaking, so the result does not
/// depend on the number of threads.
pub fn solve_exhaustive(task: &FuzzyTask, cfg: &SolverConfig) -> Result<Schedule> {
    let candidates = (cfg.grid.len() as f64).powi(task.len() as i32);
    if candidates > cfg.max_candidates as f64 {
        return Err(Error::SearchSpaceTooLarge { candidates, limit: cfg.max_candidates });
    }
    let problem = GridProblem::new(task, cfg)?;
    let (k, n) = (problem.k(), problem.n());

    let best = (0..k)
        .into_par_iter()
        .map(|first| {
            let mut idx = vec![0; n];
            idx[0] = first;
            let mut best = (idx.clone(), problem.objective(&idx));
            // odometer over the remaining coordinates, last one fastest
            loop {
                let mut pos = n - 1;
                loop {
                    if pos == 0 {
                        return best;
                    }
                    idx[pos] += 1;
                    if idx[pos] < k {
                        break;
                    }
                    idx[pos] = 0;
                    pos -= 1;
                }
                let value = problem.objective(&idx);
                if value > best.1 {
                    best = (idx.clone(), value);
                }
            }
        })
        .reduce_with(|a, b| if better((&b.0, b.1), (&a.0, a.1)) { b } else { a })
        .expect("grid has at least one point");

    if best.1 <= 0.0 {
        return Err(Error::NoFeasibleSchedule("no grid start vector avoids overlaps".into()));
    }
    problem.schedule(&best.0)
}

/// Steepest-ascent hill climbing over single-skill moves of one grid step,
/// restarted from the greedy packing and from seeded random feasible vectors.
///
/// A move is taken only if it raises the objective, or keeps it equal while
/// making the start vector lexicographically smaller (the global tie rule),
/// so every climb terminates.
pub fn solve_hill_climb(task: &FuzzyTask, cfg: &SolverConfig) -> Result<Schedule> {
    let problem = GridProblem::new(task, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<(Vec<usize>, f64)> = None;
    for start in problem.initial_states(&mut rng)? {
        let (idx, value) = problem.hill_climb_from(start);
        if best.as_ref().is_none_or(|b| better((&idx, value), (&b.0, b.1))) {
            best = Some((idx, value));
        }
    }
    problem.schedule(&best.expect("greedy state always exists").0)
}

/// Simulated annealing, one chain per initial state (the greedy packing and
/// `restarts - 1` random feasible vectors).
///
/// Each proposal moves one random skill by 1 to `sa_step_window` grid steps
/// in a random direction; infeasible proposals are rejected. A worse state is
/// accepted with probability `exp((ln f' - ln f) / T)` and the temperature
/// is cooled geometrically from `sa_initial_temp` until it drops below
/// `sa_min_temp` (at least one round is always run). Returns the best state
/// seen over all chains.
pub fn solve_sim_anneal(task: &FuzzyTask, cfg: &SolverConfig) -> Result<Schedule> {
    solve_sim_anneal_traced(task, cfg).map(|(s, _)| s)
}

/// Like [`solve_sim_anneal`], also returning for every chain the objective
/// of each accepted state in order, starting with the chain's initial state.
pub fn solve_sim_anneal_traced(task: &FuzzyTask, cfg: &SolverConfig) -> Result<(Schedule, Vec<Vec<f64>>)> {
    let problem = GridProblem::new(task, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut traces = Vec::new();
    for start in problem.initial_states(&mut rng)? {
        let (idx, value, trace) = problem.anneal_from(start, &mut rng);
        if best.as_ref().is_none_or(|b| better((&idx, value), (&b.0, b.1))) {
            best = Some((idx, value));
        }
        traces.push(trace);
    }
    Ok((problem.schedule(&best.expect("greedy state always exists").0)?, traces))
}

impl GridProblem<'_> {
    fn anneal_from(&self, mut current: Vec<usize>, rng: &mut ChaCha8Rng) -> (Vec<usize>, f64, Vec<f64>) {
        let cfg = self.cfg;
        let k = self.k() as i64;
        let window = cfg.sa_step_window as i64;
        let mut current_value = self.objective(&current);
        let mut best = (current.clone(), current_value);
        let mut trace = vec![current_value];

        let mut temp = cfg.sa_initial_temp;
        loop {
            for _ in 0..cfg.sa_iters_per_temp {
                let skill = rng.random_range(0..self.n());
                let step = rng.random_range(1..=window);
                let step = if rng.random_bool(0.5) { step } else { -step };
                let target = current[skill] as i64 + step;
                if !(0..k).contains(&target) {
                    continue;
                }
                let mut cand = current.clone();
                cand[skill] = target as usize;
                let value = self.objective(&cand);
                if value <= 0.0 {
                    continue;
                }
                let delta = value.ln() - current_value.ln();
                if delta >= 0.0 || rng.random::<f64>() < (delta / temp).exp() {
                    current = cand;
                    current_value = value;
                    trace.push(value);
                    if better((&current, current_value), (&best.0, best.1)) {
                        best = (current.clone(), current_value);
                    }
                }
            }
            temp *= cfg.sa_cooling;
            if temp < cfg.sa_min_temp {
                break;
            }
        }
        (best.0, best.1, trace)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FuzzySkill, SampledFunction, SatisfactionFunction, Trapezoid};

    fn trap(a: f64, b: f64, c: f64, d: f64) -> SatisfactionFunction {
        Trapezoid::new(a, b, c, d).unwrap().into()
    }

    fn task(skills: &[(&str, SatisfactionFunction, f64)]) -> FuzzyTask {
        FuzzyTask::new(skills.iter().map(|(id, f, d)| FuzzySkill::new(*id, f.clone(), *d).unwrap()).collect()).unwrap()
    }

    fn minute_grid() -> SolverConfig {
        SolverConfig::new(SamplingGrid::new(0.0, 600.0, 1.0 / 60.0).unwrap())
    }

    fn two_plateau_task() -> FuzzyTask {
        task(&[("A", trap(0.0, 120.0, 240.0, 360.0), 120.0), ("B", trap(120.0, 240.0, 360.0, 480.0), 120.0)])
    }

    #[test]
    fn overlap_checks() {
        assert!(check_no_overlap(&[0.0, 120.0], &[120.0, 60.0]));
        assert!(!check_no_overlap(&[0.0, 119.0], &[120.0, 60.0]));
        assert!(check_no_overlap(&[5.0], &[100.0]));
        assert!(check_no_overlap(&[300.0, 0.0, 100.0], &[10.0, 100.0, 200.0]));
        assert!(!check_no_overlap(&[300.0, 0.0, 100.0], &[10.0, 100.0, 201.0]));
    }

    #[test]
    fn objective_cases() {
        let single = task(&[("A", trap(0.0, 60.0, 120.0, 180.0), 10.0)]);
        assert_eq!(objective(&single, &[150.0], 1e-6).unwrap(), 0.5);
        let t = two_plateau_task();
        assert_eq!(objective(&t, &[120.0, 240.0], 1e-6).unwrap(), 1.0);
        assert_eq!(objective(&t, &[0.0, 60.0], 1e-6).unwrap(), 0.0);
        assert!(matches!(objective(&t, &[0.0], 1e-6), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn epsilon_floor_reported() {
        let t = two_plateau_task();
        let s = evaluate(&t, &[120.0, 500.0], 1e-6).unwrap();
        assert!(s.feasible);
        assert_eq!(s.objective, 1e-6);
        assert_eq!(s.below_threshold.iter().map(|s| s.0.as_str()).collect::<Vec<_>>(), ["B"]);
    }

    #[test]
    fn exhaustive_two_plateaus() {
        let s = solve_exhaustive(&two_plateau_task(), &minute_grid()).unwrap();
        assert_eq!(s.objective, 1.0);
        assert_eq!(s.start_times(), [120.0, 240.0]);
    }

    #[test]
    fn exhaustive_prefers_earliest_plateau_point() {
        let t = task(&[("A", trap(0.0, 60.0, 120.0, 180.0), 30.0)]);
        let s = solve_exhaustive(&t, &minute_grid()).unwrap();
        assert_eq!(s.start_times(), [60.0]);
    }

    #[test]
    fn identical_skills_forced_off_plateau() {
        let psi = trap(0.0, 0.0, 60.0, 120.0);
        let t = task(&[("A", psi.clone(), 300.0), ("B", psi.clone(), 300.0)]);
        let cfg = minute_grid();
        let s = solve_exhaustive(&t, &cfg).unwrap();
        // brute force over the grid
        let mut best = 0.0f64;
        for x in cfg.grid.times() {
            for y in cfg.grid.times() {
                best = best.max(objective(&t, &[x, y], cfg.epsilon).unwrap());
            }
        }
        assert_eq!(s.objective, best);
        assert!(s.objective < 1.0);
        assert_eq!(s.start_times(), [0.0, 300.0]);
    }

    #[test]
    fn capacity_and_guard_errors() {
        let psi = trap(0.0, 0.0, 60.0, 120.0);
        let t = task(&[("A", psi.clone(), 400.0), ("B", psi.clone(), 300.0)]);
        let cfg = minute_grid();
        assert!(matches!(solve_exhaustive(&t, &cfg), Err(Error::NoFeasibleSchedule(_))));
        assert!(matches!(solve_hill_climb(&t, &cfg), Err(Error::NoFeasibleSchedule(_))));
        assert!(matches!(solve_sim_anneal(&t, &cfg), Err(Error::NoFeasibleSchedule(_))));

        let many: Vec<_> = (0..8).map(|i| (format!("s{i}"), psi.clone(), 1.0)).collect();
        let t =
            FuzzyTask::new(many.into_iter().map(|(id, f, d)| FuzzySkill::new(id, f, d).unwrap()).collect()).unwrap();
        assert!(matches!(solve_exhaustive(&t, &cfg), Err(Error::SearchSpaceTooLarge { .. })));
    }

    #[test]
    fn fit_on_time_but_not_on_grid() {
        // two 50 s skills fit into 100 s but the grid has a single point
        let psi = trap(0.0, 0.0, 60.0, 120.0);
        let t = task(&[("A", psi.clone(), 50.0), ("B", psi, 50.0)]);
        let cfg = SolverConfig::new(SamplingGrid::with_period(0.0, 100.0, 60.0).unwrap());
        assert!(matches!(solve_hill_climb(&t, &cfg), Err(Error::NoFeasibleSchedule(_))));
        assert!(matches!(solve_exhaustive(&t, &cfg), Err(Error::NoFeasibleSchedule(_))));
    }

    #[test]
    fn packs_when_argmax_order_does_not_fit() {
        // argmax order puts the long skill second, which runs off the grid
        let t = task(&[
            ("k0", trap(0.0, 0.0, 0.0, 0.0), 120.6),
            ("k1", trap(0.0, 159.4, 159.4, 159.4), 5.0),
            ("k2", trap(470.0, 470.0, 470.0, 470.0), 144.2),
        ]);
        let cfg = SolverConfig::new(SamplingGrid::with_period(0.0, 270.0, 30.0).unwrap());
        let ex = solve_exhaustive(&t, &cfg).unwrap();
        for s in [solve_hill_climb(&t, &cfg).unwrap(), solve_sim_anneal(&t, &cfg).unwrap()] {
            assert!(s.feasible);
            assert!(s.objective <= ex.objective);
        }
    }

    #[test]
    fn hill_climb_matches_exhaustive_on_two_plateaus() {
        let cfg = minute_grid();
        let hc = solve_hill_climb(&two_plateau_task(), &cfg).unwrap();
        assert_eq!(hc.objective, 1.0);
        assert!(hc.feasible);
    }

    #[test]
    fn single_skill_hill_climb_is_grid_argmax() {
        let cfg = minute_grid();
        let bell: SatisfactionFunction = crate::model::Bell::new(250.0, 80.0).unwrap().into();
        let t = task(&[("A", bell, 60.0)]);
        let hc = solve_hill_climb(&t, &cfg).unwrap();
        let ex = solve_exhaustive(&t, &cfg).unwrap();
        assert_eq!(hc, ex);
        assert_eq!(ex.start_times(), [240.0]);
    }

    /// Greedy packing puts A on the shared peak and pushes the narrow B into
    /// its zero region; single-step moves cannot swap the two.
    fn adversarial() -> (FuzzyTask, SolverConfig) {
        let t = task(&[("A", trap(5.0, 10.0, 10.0, 25.0), 5.0), ("B", trap(8.0, 10.0, 10.0, 12.0), 5.0)]);
        (t, SolverConfig::new(SamplingGrid::new(0.0, 30.0, 1.0).unwrap()))
    }

    #[test]
    fn restarts_escape_local_optimum() {
        let (t, cfg) = adversarial();
        let ex = solve_exhaustive(&t, &cfg).unwrap();
        let one = solve_hill_climb(&t, &SolverConfig { restarts: 1, ..cfg.clone() }).unwrap();
        assert!(one.objective < ex.objective);
        let many = solve_hill_climb(&t, &cfg).unwrap();
        assert_eq!(many.objective, ex.objective);
        assert_eq!(many.start_times(), ex.start_times());
    }

    #[test]
    fn anneal_reaches_optimum_on_two_plateaus() {
        let cfg = minute_grid();
        let ex = solve_exhaustive(&two_plateau_task(), &cfg).unwrap();
        let sa = solve_sim_anneal(&two_plateau_task(), &cfg).unwrap();
        assert!((sa.objective - ex.objective).abs() <= 1e-9);
    }

    #[test]
    fn anneal_is_deterministic() {
        let (t, cfg) = adversarial();
        let cfg = cfg.with_seed(99);
        assert_eq!(solve_sim_anneal(&t, &cfg).unwrap(), solve_sim_anneal(&t, &cfg).unwrap());
    }

    #[test]
    fn cold_anneal_never_accepts_worse() {
        // greedy packing pushes B onto the foot of its second bump, which
        // cold annealing then climbs
        let g = SamplingGrid::new(0.0, 600.0, 0.1).unwrap();
        let first = Trapezoid::new(100.0, 150.0, 150.0, 200.0).unwrap();
        let second = Trapezoid::new(280.0, 380.0, 380.0, 480.0).unwrap();
        let values = g.times().map(|t| first.eval(t).max(0.8 * second.eval(t))).collect();
        let b: SatisfactionFunction = SampledFunction::new(g.clone(), values).unwrap().into();
        let t = task(&[("A", trap(0.0, 100.0, 100.0, 400.0), 200.0), ("B", b, 50.0)]);
        let cfg = SolverConfig {
            sa_initial_temp: 1e-12,
            sa_min_temp: 1e-12,
            sa_iters_per_temp: 2000,
            ..SolverConfig::new(g)
        };
        let (best, traces) = solve_sim_anneal_traced(&t, &cfg).unwrap();
        let greedy_chain = &traces[0];
        assert!(greedy_chain.len() > 1);
        for trace in &traces {
            assert!(trace.windows(2).all(|w| w[1] >= w[0]));
        }
        assert!(best.objective > greedy_chain[0]);
    }

    #[test]
    fn to_specific_projection() {
        let t = FuzzyTask::new(vec![
            FuzzySkill::new("A", trap(0.0, 120.0, 240.0, 360.0), 120.0)
                .unwrap()
                .with_specific_param("object", "cup")
                .with_fuzzy_param("speed", "quickly"),
            FuzzySkill::new("B", trap(120.0, 240.0, 360.0, 480.0), 120.0).unwrap().with_specific_param("x", "1"),
        ])
        .unwrap();
        let s = solve_exhaustive(&t, &minute_grid()).unwrap();
        let specific = to_specific(&t, &s).unwrap();
        assert_eq!(specific.len(), 2);
        assert_eq!(specific[0].start.seconds(), 120.0);
        assert_eq!(specific[0].params.get("speed").map(String::as_str), Some("quickly"));
        assert!(specific[0].unresolved.contains("speed"));
        assert_eq!(specific[1].params, t.skills()[1].specific_params);
        assert!(specific[1].unresolved.is_empty());

        let infeasible = evaluate(&t, &[0.0, 60.0], 1e-6).unwrap();
        assert_eq!(to_specific(&t, &infeasible), Err(Error::InfeasibleSchedule));
    }

    #[test]
    fn sampled_satisfaction_is_schedulable() {
        let g = SamplingGrid::new(0.0, 600.0, 1.0 / 60.0).unwrap();
        let values = vec![0.0, 0.2, 0.4, 1.0, 0.4, 0.2, 0.0, 0.0, 0.0, 0.0];
        let psi: SatisfactionFunction = SampledFunction::new(g.clone(), values).unwrap().into();
        let t = task(&[("A", psi, 60.0)]);
        let s = solve_exhaustive(&t, &SolverConfig::new(g)).unwrap();
        assert_eq!(s.start_times(), [180.0]);
    }
}
