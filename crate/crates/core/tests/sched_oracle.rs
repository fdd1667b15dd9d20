//! Solvers against an independent brute-force enumeration, plus scheduling
//! invariants.

mod common;

use common::{brute_force, indices, pairwise_disjoint, random_instance};
use fuzzy_time::model::{FuzzySkill, FuzzyTask, SamplingGrid, Trapezoid};
use fuzzy_time::sched::{self, check_no_overlap, evaluate, SolverConfig};
use proptest::prelude::*;

#[test]
fn exhaustive_matches_brute_force() {
    for seed in 0..100 {
        for n in 1..=3 {
            let (task, cfg) = random_instance(seed, n);
            let (idx, best) = brute_force(&task, &cfg);
            let ex = sched::solve_exhaustive(&task, &cfg).unwrap();
            assert_eq!(ex.objective, best, "seed {seed} n {n}");
            assert_eq!(indices(&cfg, &ex.start_times()), idx, "seed {seed} n {n}");
        }
    }
}

#[test]
fn heuristics_close_to_exhaustive() {
    let (mut hc_ok, mut sa_ok) = (0, 0);
    for seed in 100..200 {
        let (task, cfg) = random_instance(seed, 3);
        let best = sched::solve_exhaustive(&task, &cfg).unwrap().objective;
        let hc = sched::solve_hill_climb(&task, &cfg).unwrap().objective;
        let sa = sched::solve_sim_anneal(&task, &cfg).unwrap().objective;
        assert!(hc <= best && sa <= best);
        hc_ok += usize::from(hc >= 0.95 * best);
        sa_ok += usize::from(sa >= 0.99 * best);
    }
    assert!(hc_ok >= 90, "hill climbing {hc_ok}/100");
    assert!(sa_ok >= 95, "annealing {sa_ok}/100");
}

/// Fast settings so that many instances fit in a property test.
fn quick(cfg: SolverConfig) -> SolverConfig {
    SolverConfig { restarts: 4, sa_cooling: 0.8, sa_iters_per_temp: 20, ..cfg }
}

fn arb_task() -> impl Strategy<Value = (FuzzyTask, SolverConfig)> {
    let skill = (0.0..500.0f64, 0.0..200.0f64, 0.0..200.0f64, 0.0..200.0f64, 5.0..150.0f64);
    (proptest::collection::vec(skill, 1..=3), 8usize..=20, 0u64..1000).prop_map(|(skills, k, seed)| {
        let skills = skills
            .into_iter()
            .enumerate()
            .map(|(i, (a, w1, w2, w3, d))| {
                let psi = Trapezoid::new(a, a + w1, a + w1 + w2, a + w1 + w2 + w3).unwrap();
                FuzzySkill::new(format!("k{i}"), psi, d).unwrap()
            })
            .collect();
        let grid = SamplingGrid::with_period(0.0, 30.0 * k as f64, 30.0).unwrap();
        (FuzzyTask::new(skills).unwrap(), quick(SolverConfig::new(grid).with_seed(seed)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn outputs_never_overlap_and_are_dominated((task, cfg) in arb_task()) {
        let ex = sched::solve_exhaustive(&task, &cfg);
        let hc = sched::solve_hill_climb(&task, &cfg);
        let sa = sched::solve_sim_anneal(&task, &cfg);
        let durations = task.durations();
        match (ex, hc, sa) {
            (Ok(ex), Ok(hc), Ok(sa)) => {
                for s in [&ex, &hc, &sa] {
                    prop_assert!(s.feasible);
                    prop_assert!(check_no_overlap(&s.start_times(), &durations));
                    prop_assert!(pairwise_disjoint(&s.start_times(), &durations));
                    prop_assert!((0.0..=1.0).contains(&s.objective));
                }
                prop_assert!(ex.objective >= hc.objective);
                prop_assert!(ex.objective >= sa.objective);
            }
            (Err(e1), Err(e2), Err(e3)) => {
                prop_assert!(matches!(e1, fuzzy_time::Error::NoFeasibleSchedule(_)));
                prop_assert_eq!(&e1, &e2);
                prop_assert_eq!(&e1, &e3);
            }
            (ex, hc, sa) => prop_assert!(false, "solvers disagree on feasibility: {ex:?} {hc:?} {sa:?}"),
        }
    }

    #[test]
    fn scaling_keeps_start_indices((task, cfg) in arb_task(), power in -3i32..=3) {
        let f = 2f64.powi(power);
        let scaled_task = FuzzyTask::new(
            task.skills()
                .iter()
                .map(|s| {
                    let [a, b, c, d] = s.psi.as_trapezoid().unwrap().corners();
                    let psi = Trapezoid::new(a * f, b * f, c * f, d * f).unwrap();
                    FuzzySkill::new(s.id.clone(), psi, s.duration * f).unwrap()
                })
                .collect(),
        )
        .unwrap();
        let grid = SamplingGrid::with_period(cfg.grid.start() * f, cfg.grid.end() * f, cfg.grid.period() * f).unwrap();
        let scaled_cfg = SolverConfig { grid, ..cfg.clone() };
        prop_assert_eq!(scaled_cfg.grid.len(), cfg.grid.len());
        type Solver = fn(&FuzzyTask, &SolverConfig) -> fuzzy_time::Result<sched::Schedule>;
        let solvers: [Solver; 3] = [sched::solve_exhaustive, sched::solve_hill_climb, sched::solve_sim_anneal];
        for solve in solvers {
            match (solve(&task, &cfg), solve(&scaled_task, &scaled_cfg)) {
                (Ok(x), Ok(y)) => {
                    prop_assert_eq!(indices(&cfg, &x.start_times()), indices(&scaled_cfg, &y.start_times()));
                    prop_assert_eq!(x.objective, y.objective);
                }
                (Err(_), Err(_)) => {}
                (x, y) => prop_assert!(false, "{x:?} vs {y:?}"),
            }
        }
    }

    #[test]
    fn epsilon_only_rescales_floored_schedules(
        (task, cfg) in arb_task(),
        picks in proptest::collection::vec(0usize..20, 3),
    ) {
        let starts: Vec<f64> = picks.iter().take(task.len()).map(|&j| cfg.grid.time(j % cfg.grid.len())).collect();
        let coarse = evaluate(&task, &starts, 1e-2).unwrap();
        let fine = evaluate(&task, &starts, 1e-8).unwrap();
        prop_assert_eq!(coarse.feasible, fine.feasible);
        if fine.feasible {
            prop_assert!(fine.below_threshold.is_subset(&coarse.below_threshold));
            prop_assert!(fine.objective <= coarse.objective);
            if coarse.below_threshold.is_empty() {
                prop_assert_eq!(fine.objective, coarse.objective);
            }
        } else {
            prop_assert_eq!(fine.objective, 0.0);
            prop_assert_eq!(coarse.objective, 0.0);
        }
    }
}

#[test]
fn identical_across_thread_counts() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            (0..10)
                .map(|seed| {
                    let (task, cfg) = random_instance(seed, 3);
                    (
                        sched::solve_exhaustive(&task, &cfg).unwrap(),
                        sched::solve_hill_climb(&task, &cfg).unwrap(),
                        sched::solve_sim_anneal(&task, &cfg).unwrap(),
                    )
                })
                .collect::<Vec<_>>()
        })
    };
    assert_eq!(run(1), run(4));
}
