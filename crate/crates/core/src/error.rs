use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid time point: {0}")]
    InvalidTime(f64),
    #[error("invalid sampling grid: {0}")]
    InvalidGrid(String),
    #[error("invalid satisfaction function: {0}")]
    InvalidFunction(String),
    #[error("time scale must be nonzero and finite, got {0}")]
    InvalidScale(f64),
    #[error("time shift must be finite and non-negative, got {0}")]
    InvalidShift(f64),
    #[error("invalid task: {0}")]
    InvalidTask(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no temporal modifier found in instruction")]
    NoTemporalModifier,
    #[error("instruction names more than one time: {first:?} and {second:?}")]
    AmbiguousTime { first: String, second: String },
    #[error("specified time {t_spec} s lies beyond the horizon {t_max} s")]
    BeyondHorizon { t_spec: f64, t_max: f64 },

    #[error("expected {expected} start times, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("search space of {candidates} candidates exceeds the limit of {limit}")]
    SearchSpaceTooLarge { candidates: f64, limit: u64 },
    #[error("no feasible schedule: {0}")]
    NoFeasibleSchedule(String),
    #[error("schedule is infeasible")]
    InfeasibleSchedule,

    #[error("ensemble is empty")]
    EmptyEnsemble,
    #[error("ensemble members do not share a grid")]
    GridMismatch,
    #[error("quantile level must lie in (0, 1), got {0}")]
    InvalidQuantile(f64),
    #[error("bin width must lie in (0, 1], got {0}")]
    InvalidBinWidth(f64),
    #[error("function has zero mass")]
    ZeroMass,
    #[error("sample is empty")]
    EmptySample,

    #[error("residual is not finite")]
    NonFiniteResidual,
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),
    #[error("fit target is zero everywhere")]
    AllZeroTarget,
}
