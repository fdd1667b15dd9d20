//! Compares how lenient the robot and person groups are per instruction and
//! tests the difference with a Mann-Whitney U test.

use fuzzy_time::aggregate::{density_variance, mann_whitney_u};
use fuzzy_time::cli::{compare_groups, ensemble_for, synthesize, Group, SynthConfig};
use fuzzy_time::nlparse::{LookupConfig, STUDY_INSTRUCTIONS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let participants = std::env::args().nth(1).map_or(Ok(32), |n| n.parse())?;
    let rows = synthesize(&SynthConfig::new(participants, 7), &LookupConfig::default())?;

    println!("{:<18} {:>12} {:>12} {:>12}", "instruction", "robot", "person", "difference");
    let mut wider = 0;
    for s in &STUDY_INSTRUCTIONS {
        let cmp = compare_groups(&rows, s.tag)?;
        wider += usize::from(cmp.robot_variance > cmp.person_variance);
        println!(
            "{:<18} {:>12.0} {:>12.0} {:>12.0}",
            s.tag, cmp.robot_variance, cmp.person_variance, cmp.variance_difference
        );
    }
    println!("robot group more lenient for {wider}/{} instructions", STUDY_INSTRUCTIONS.len());

    let tag = "in_approx_10min";
    let per_participant = |group| -> Result<Vec<f64>, Box<dyn std::error::Error>> {
        let e = ensemble_for(&rows, tag, Some(group))?;
        Ok(e.members().iter().map(density_variance).collect::<fuzzy_time::Result<_>>()?)
    };
    let (robot, person) = (per_participant(Group::Robot)?, per_participant(Group::Person)?);
    let test = mann_whitney_u(&robot, &person)?;
    println!(
        "{tag}: U = {}, p = {:.4} ({})",
        test.u,
        test.p,
        if test.exact { "exact" } else { "normal approximation" }
    );
    Ok(())
}
