//! Schedules a fuzzy task with every solver and turns the best schedule into
//! executable skills.
//!
//! ```text
//! cargo run --example schedule_task
//! cargo run --example schedule_task -- crates/core/examples/data/demo_task.json
//! ```

use std::path::PathBuf;
use std::time::Instant;

use fuzzy_time::cli::{ScheduleFlags, TaskDocument};
use fuzzy_time::nlparse::LookupConfig;
use fuzzy_time::sched::{solve_exhaustive, solve_hill_climb, solve_sim_anneal, to_specific};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/kitchen_task.json"));
    let doc = TaskDocument::from_json(&std::fs::read_to_string(&path)?)?;
    let task = doc.to_task(&LookupConfig::default())?;
    let (_, cfg) = doc.solver_config(&ScheduleFlags::default())?;
    println!("{} skills on a {}-point grid ({}s period)", task.len(), cfg.grid.len(), cfg.grid.period());

    let mut best = None;
    for (name, solve) in [
        ("exhaustive", solve_exhaustive as fn(&_, &_) -> _),
        ("hill climbing", solve_hill_climb),
        ("annealing", solve_sim_anneal),
    ] {
        let clock = Instant::now();
        let schedule = solve(&task, &cfg)?;
        println!("{name:<14} objective {:.4} in {:?}", schedule.objective, clock.elapsed());
        if best.as_ref().is_none_or(|b: &fuzzy_time::sched::Schedule| schedule.objective > b.objective) {
            best = Some(schedule);
        }
    }

    let best = best.expect("at least one solver ran");
    for skill in to_specific(&task, &best)? {
        println!(
            "  {:<8} start {:>6.0}s  duration {:>4.0}s  params {:?}",
            skill.id.to_string(),
            skill.start.seconds(),
            skill.duration,
            skill.params
        );
    }
    if !best.below_threshold.is_empty() {
        println!("  below threshold: {:?}", best.below_threshold);
    }
    Ok(())
}
