//! JSON task documents for the `schedule` command.

use serde::{Deserialize, Serialize};

use super::{CliError, CliResult, ScheduleFlags, SolverKind};
use crate::model::{FuzzySkill, FuzzyTask, SamplingGrid, SatisfactionFunction};
use crate::nlparse::{derive_satisfaction, LookupConfig};
use crate::sched::SolverConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskDocument {
    pub skills: Vec<SkillRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverOverrides>,
}

/// A skill given either by an instruction to parse or by an explicit function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkillRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instruction: Option<String>,
    pub duration_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub satisfaction: Option<SatisfactionFunction>,
}

/// Optional solver settings; absent fields take the library defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOverrides {
    pub algorithm: Option<SolverKind>,
    pub seed: Option<u64>,
    pub grid_start: Option<f64>,
    pub grid_end: Option<f64>,
    pub rate: Option<f64>,
    pub epsilon: Option<f64>,
    pub restarts: Option<usize>,
    pub sa_initial_temp: Option<f64>,
    pub sa_cooling: Option<f64>,
    pub sa_iters_per_temp: Option<usize>,
    pub sa_min_temp: Option<f64>,
    pub sa_step_window: Option<usize>,
    pub max_candidates: Option<u64>,
}

pub const DEFAULT_GRID_END: f64 = 3600.0;
pub const DEFAULT_RATE: f64 = 1.0 / 60.0;

impl TaskDocument {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("task document: {e}")))
    }

    /// Builds the fuzzy task. An explicit function takes precedence over the
    /// instruction.
    pub fn to_task(&self, lookup: &LookupConfig) -> CliResult<FuzzyTask> {
        let mut skills = Vec::with_capacity(self.skills.len());
        for record in &self.skills {
            let psi = match (&record.satisfaction, &record.instruction) {
                (Some(f), _) => f.clone(),
                (None, Some(text)) => derive_satisfaction(text, lookup)?.1,
                (None, None) => {
                    return Err(CliError::Invalid(format!(
                        "skill {:?} needs an instruction or a satisfaction function",
                        record.id
                    )))
                }
            };
            let mut skill = FuzzySkill::new(record.id.as_str(), psi, record.duration_s)?;
            if let Some(text) = &record.instruction {
                skill = skill.with_fuzzy_param("instruction", text.as_str());
            }
            skills.push(skill);
        }
        Ok(FuzzyTask::new(skills)?)
    }

    /// Solver and configuration from the document with `flags` on top.
    pub fn solver_config(&self, flags: &ScheduleFlags) -> CliResult<(SolverKind, SolverConfig)> {
        let o = self.solver.clone().unwrap_or_default();
        let start = flags.grid_start.or(o.grid_start).unwrap_or(0.0);
        let end = flags.grid_end.or(o.grid_end).unwrap_or(DEFAULT_GRID_END);
        let rate = flags.rate.or(o.rate).unwrap_or(DEFAULT_RATE);
        let mut cfg = SolverConfig::new(SamplingGrid::new(start, end, rate)?);
        cfg.seed = flags.seed.or(o.seed).unwrap_or(cfg.seed);
        cfg.epsilon = o.epsilon.unwrap_or(cfg.epsilon);
        cfg.restarts = o.restarts.unwrap_or(cfg.restarts);
        cfg.sa_initial_temp = o.sa_initial_temp.unwrap_or(cfg.sa_initial_temp);
        cfg.sa_cooling = o.sa_cooling.unwrap_or(cfg.sa_cooling);
        cfg.sa_iters_per_temp = o.sa_iters_per_temp.unwrap_or(cfg.sa_iters_per_temp);
        cfg.sa_min_temp = o.sa_min_temp.unwrap_or(cfg.sa_min_temp);
        cfg.sa_step_window = o.sa_step_window.unwrap_or(cfg.sa_step_window);
        cfg.max_candidates = o.max_candidates.unwrap_or(cfg.max_candidates);
        cfg.validate()?;
        let solver = flags.solver.or(o.algorithm).unwrap_or(SolverKind::Exhaustive);
        Ok((solver, cfg))
    }
}
