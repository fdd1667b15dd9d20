//! Command implementations behind the `fuzzy-time` binary: task documents,
//! ensemble tables, synthetic study data and SVG plots.
//!
//! Every command returns its stdout payload as a string so it can be tested
//! without spawning a process.

pub mod document;
pub mod svg;
pub mod synth;
pub mod table;

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::aggregate::{
    density_variance, pointwise_mean, pointwise_median, pointwise_mode, summarize, DEFAULT_MODE_BIN_WIDTH,
};
use crate::error::Error;
use crate::fit::{best_fit, fit_bell, fit_trapezoid, FitConfig};
use crate::model::{SampledFunction, SamplingGrid};
use crate::nlparse::{derive_satisfaction, LookupConfig, TimeSpec};
use crate::sched::{solve_exhaustive, solve_hill_climb, solve_sim_anneal, Schedule, SolverConfig};

pub use document::{SkillRecord, SolverOverrides, TaskDocument};
pub use synth::{synthesize, SynthConfig};
pub use table::{ensemble_for, read_table, write_table, EnsembleRow, Group};

/// Environment variable naming a lookup configuration file.
pub const CONFIG_ENV: &str = "FS_CONFIG";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    NotFound(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl CliError {
    /// 0 ok, 1 validation, 2 not found or no match, 3 infeasible, 4 capacity.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::NoTemporalModifier) | CliError::NotFound(_) => 2,
            CliError::Core(Error::NoFeasibleSchedule(_) | Error::InfeasibleSchedule) => 3,
            CliError::Core(Error::SearchSpaceTooLarge { .. }) => 4,
            _ => 1,
        }
    }

    pub(crate) fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Io { path: path.to_owned(), message: err.to_string() }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn to_json(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("output types serialize")
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

/// Lookup constants from `explicit`, else the file named by `FS_CONFIG`,
/// else the defaults.
pub fn load_lookup_config(explicit: Option<&Path>) -> CliResult<LookupConfig> {
    let from_env = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
    let cfg = match explicit.map(Path::to_owned).or(from_env) {
        Some(path) => read_json::<LookupConfig>(&path)?,
        None => LookupConfig::default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Serialize)]
struct ParseOutput<'a> {
    instruction: &'a str,
    #[serde(flatten)]
    time_spec: TimeSpec,
    satisfaction: crate::model::SatisfactionFunction,
    trapezoid: Option<[f64; 4]>,
}

/// Extracts the time requirement of `text` and its derived satisfaction function.
pub fn cmd_parse(text: &str, cfg: &LookupConfig) -> CliResult<String> {
    let (time_spec, satisfaction) = derive_satisfaction(text, cfg)?;
    let trapezoid = satisfaction.as_trapezoid().map(|t| t.corners());
    Ok(to_json(&ParseOutput { instruction: text, time_spec, satisfaction, trapezoid }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Exhaustive,
    Hc,
    Sa,
}

impl SolverKind {
    pub fn solve(self, task: &crate::model::FuzzyTask, cfg: &SolverConfig) -> crate::Result<Schedule> {
        match self {
            SolverKind::Exhaustive => solve_exhaustive(task, cfg),
            SolverKind::Hc => solve_hill_climb(task, cfg),
            SolverKind::Sa => solve_sim_anneal(task, cfg),
        }
    }
}

/// Command-line overrides for `schedule`; unset fields fall back to the document.
#[derive(Debug, Clone, Default)]
pub struct ScheduleFlags {
    pub solver: Option<SolverKind>,
    pub seed: Option<u64>,
    pub grid_start: Option<f64>,
    pub grid_end: Option<f64>,
    pub rate: Option<f64>,
}

/// Solves the task in `doc`, parsing instructions that lack explicit functions.
pub fn cmd_schedule(doc: &TaskDocument, flags: &ScheduleFlags, lookup: &LookupConfig) -> CliResult<String> {
    let task = doc.to_task(lookup)?;
    let (solver, cfg) = doc.solver_config(flags)?;
    let schedule = solver.solve(&task, &cfg)?;
    let starts = schedule.starts.iter().map(|(id, t)| StartRecord { id: id.0.clone(), start_s: t.seconds() }).collect();
    Ok(to_json(&ScheduleOutput {
        starts,
        objective: schedule.objective,
        feasible: schedule.feasible,
        below_threshold: schedule.below_threshold.iter().map(|id| id.0.clone()).collect(),
        solver,
        seed: cfg.seed,
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct StartRecord {
    pub id: String,
    pub start_s: f64,
}

/// Output of `schedule`.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct ScheduleOutput {
    pub starts: Vec<StartRecord>,
    pub objective: f64,
    pub feasible: bool,
    pub below_threshold: Vec<String>,
    pub solver: SolverKind,
    pub seed: u64,
}

fn series(f: &SampledFunction) -> Vec<f64> {
    f.values().to_vec()
}

/// Density variance of the median of each group for one instruction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct GroupComparison {
    pub robot_variance: f64,
    pub person_variance: f64,
    /// Person minus robot; negative when the robot group is wider.
    pub variance_difference: f64,
}

pub fn compare_groups(rows: &[EnsembleRow], tag: &str) -> CliResult<GroupComparison> {
    let variance =
        |g| -> CliResult<f64> { Ok(density_variance(&pointwise_median(&ensemble_for(rows, tag, Some(g))?))?) };
    let robot_variance = variance(Group::Robot)?;
    let person_variance = variance(Group::Person)?;
    Ok(GroupComparison { robot_variance, person_variance, variance_difference: person_variance - robot_variance })
}

/// Point-wise statistics of one instruction's ensemble, optionally restricted
/// to one group, with an optional SVG plot written to `svg`.
pub fn cmd_aggregate(rows: &[EnsembleRow], tag: &str, group: Option<Group>, svg: Option<&Path>) -> CliResult<String> {
    let ensemble = ensemble_for(rows, tag, group)?;
    let summary = summarize(&ensemble, &[0.25, 0.75], DEFAULT_MODE_BIN_WIDTH)?;
    let variance = density_variance(&summary.median)?;
    let comparison = match compare_groups(rows, tag) {
        Ok(c) => Some(c),
        Err(CliError::NotFound(_)) => None,
        Err(e) => return Err(e),
    };
    if let Some(path) = svg {
        let title = match group {
            Some(g) => format!("{tag} ({g})"),
            None => tag.to_owned(),
        };
        std::fs::write(path, svg::render_summary(&summary, &title)).map_err(|e| CliError::io(path, e))?;
    }
    Ok(to_json(&AggregateOutput {
        instruction_tag: tag.to_owned(),
        group: group.map_or("all".to_owned(), |g| g.to_string()),
        members: summary.members,
        time_s: ensemble.grid().times().collect(),
        q25: series(summary.quantile(0.25).expect("requested level")),
        q75: series(summary.quantile(0.75).expect("requested level")),
        mean: series(&summary.mean),
        median: series(&summary.median),
        mode: series(&summary.mode),
        mode_ties: summary.mode_ties,
        min: series(&summary.min),
        max: series(&summary.max),
        median_density_variance: variance,
        group_comparison: comparison,
    }))
}

/// Output of `aggregate`; series are aligned with `time_s`.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct AggregateOutput {
    pub instruction_tag: String,
    pub group: String,
    pub members: usize,
    pub time_s: Vec<f64>,
    pub mean: Vec<f64>,
    pub median: Vec<f64>,
    pub mode: Vec<f64>,
    pub mode_ties: Vec<usize>,
    pub q25: Vec<f64>,
    pub q75: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub median_density_variance: f64,
    pub group_comparison: Option<GroupComparison>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FitTarget {
    #[default]
    Median,
    Mean,
    Mode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FitModel {
    Trapezoid,
    Bell,
    #[default]
    Best,
}

/// Fits a model to an aggregate of one instruction's ensemble.
pub fn cmd_fit(
    rows: &[EnsembleRow],
    tag: &str,
    target: FitTarget,
    model: FitModel,
    cfg: &FitConfig,
) -> CliResult<String> {
    let ensemble = ensemble_for(rows, tag, None)?;
    let aggregate = match target {
        FitTarget::Median => pointwise_median(&ensemble),
        FitTarget::Mean => pointwise_mean(&ensemble),
        FitTarget::Mode => pointwise_mode(&ensemble, DEFAULT_MODE_BIN_WIDTH)?,
    };
    let result = match model {
        FitModel::Trapezoid => fit_trapezoid(&aggregate, cfg)?,
        FitModel::Bell => fit_bell(&aggregate, cfg)?,
        FitModel::Best => best_fit(&aggregate, cfg)?,
    };
    let mut out = serde_json::to_value(&result).expect("fit result serializes");
    out["instruction_tag"] = json!(tag);
    out["target"] = json!(target);
    Ok(to_json(&out))
}

/// Writes a synthetic ensemble table to `out` and returns a short JSON report.
pub fn cmd_synth(cfg: &SynthConfig, lookup: &LookupConfig, out: &Path) -> CliResult<String> {
    let rows = synthesize(cfg, lookup)?;
    let file = std::fs::File::create(out).map_err(|e| CliError::io(out, e))?;
    write_table(file, &rows).map_err(|e| CliError::io(out, e))?;
    Ok(to_json(&json!({
        "out": out,
        "participants": cfg.participants,
        "seed": cfg.seed,
        "rows": rows.len(),
    })))
}

/// The grid of the satisfaction study: one hour at one sample per 4.5 s.
pub fn study_grid() -> SamplingGrid {
    SamplingGrid::with_period(0.0, 3600.0, 4.5).expect("valid constant grid")
}
