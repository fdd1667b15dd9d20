//! Long-form CSV ensemble tables, one row per participant, instruction and
//! time step.

use std::collections::BTreeMap;
use std::fmt;
use std::io;

use serde::{Deserialize, Serialize};

use super::{CliError, CliResult};
use crate::aggregate::SatisfactionEnsemble;
use crate::model::{SampledFunction, SamplingGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Robot,
    Person,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::Robot => "robot",
            Group::Person => "person",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleRow {
    pub participant_id: String,
    pub instruction_tag: String,
    pub group: Group,
    pub time_s: f64,
    pub satisfaction: f64,
}

pub const HEADER: [&str; 5] = ["participant_id", "instruction_tag", "group", "time_s", "satisfaction"];

/// Reads and validates a table; satisfaction values must lie in `[0, 1]`.
pub fn read_table<R: io::Read>(reader: R) -> CliResult<Vec<EnsembleRow>> {
    let mut csv = csv::Reader::from_reader(reader);
    let header = csv.headers().map_err(|e| CliError::Invalid(format!("ensemble table: {e}")))?;
    if header.iter().ne(HEADER) {
        return Err(CliError::Invalid(format!("ensemble table header must be {}", HEADER.join(","))));
    }
    let mut rows = Vec::new();
    for (line, record) in csv.deserialize::<EnsembleRow>().enumerate() {
        let row = record.map_err(|e| CliError::Invalid(format!("ensemble table: {e}")))?;
        if !(0.0..=1.0).contains(&row.satisfaction) || !row.time_s.is_finite() {
            return Err(CliError::Invalid(format!("ensemble table row {}: value out of range", line + 2)));
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_table<W: io::Write>(writer: W, rows: &[EnsembleRow]) -> csv::Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    for row in rows {
        csv.serialize(row)?;
    }
    csv.flush()?;
    Ok(())
}

/// Grid implied by a sorted time column: first time, first spacing, length.
fn declared_grid(times: &[f64]) -> CliResult<SamplingGrid> {
    if times.len() < 2 {
        return Err(CliError::Invalid("each participant needs at least two samples".into()));
    }
    let period = times[1] - times[0];
    let end = times[0] + times.len() as f64 * period;
    Ok(SamplingGrid::with_period(times[0], end, period)?)
}

/// Ensemble of one instruction, optionally one group, with members in
/// participant-id order. Every participant must use the same grid.
pub fn ensemble_for(rows: &[EnsembleRow], tag: &str, group: Option<Group>) -> CliResult<SatisfactionEnsemble> {
    let mut by_participant: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for row in rows.iter().filter(|r| r.instruction_tag == tag && group.is_none_or(|g| r.group == g)) {
        by_participant.entry(&row.participant_id).or_default().push((row.time_s, row.satisfaction));
    }
    if by_participant.is_empty() {
        let scope = group.map_or(String::new(), |g| format!(" in group {g}"));
        return Err(CliError::NotFound(format!("no rows for instruction {tag:?}{scope}")));
    }
    let mut grid: Option<SamplingGrid> = None;
    let mut members = Vec::with_capacity(by_participant.len());
    for (participant, mut samples) in by_participant {
        samples.sort_by(|x, y| x.0.total_cmp(&y.0));
        let times: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let g = grid.get_or_insert(declared_grid(&times)?);
        let on_grid = times.len() == g.len()
            && times.iter().enumerate().all(|(j, &t)| (t - g.time(j)).abs() <= 1e-6 * g.period().max(1.0));
        if !on_grid {
            return Err(CliError::Invalid(format!(
                "participant {participant} does not follow the grid of the first participant"
            )));
        }
        members.push(SampledFunction::new(g.clone(), samples.into_iter().map(|s| s.1).collect())?);
    }
    Ok(SatisfactionEnsemble::new(tag, members)?)
}
