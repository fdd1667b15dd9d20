use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fuzzy_time::cli::{
    self, load_lookup_config, read_table, CliError, CliResult, FitModel, FitTarget, Group, ScheduleFlags, SolverKind,
    SynthConfig, TaskDocument,
};
use fuzzy_time::fit::FitConfig;

#[derive(Parser)]
#[command(name = "fuzzy-time", version, about = "Satisfaction functions for fuzzy time requirements")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the time requirement of an instruction and derive its satisfaction function.
    Parse {
        text: String,
        /// Lookup constants as JSON; overrides FS_CONFIG.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Schedule the skills of a task document.
    Schedule {
        task: PathBuf,
        #[arg(long, value_enum)]
        solver: Option<SolverKind>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        grid_start: Option<f64>,
        #[arg(long)]
        grid_end: Option<f64>,
        /// Samples per second.
        #[arg(long)]
        rate: Option<f64>,
    },
    /// Summarise one instruction of an ensemble table.
    Aggregate {
        table: PathBuf,
        #[arg(long)]
        instruction: String,
        #[arg(long, value_enum)]
        group: Option<Group>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Fit a trapezoid or bell to an aggregate of one instruction.
    Fit {
        table: PathBuf,
        #[arg(long)]
        instruction: String,
        #[arg(long, value_enum, default_value_t = FitTarget::Median)]
        target: FitTarget,
        #[arg(long, value_enum, default_value_t = FitModel::Best)]
        model: FitModel,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a synthetic ensemble table.
    Synth {
        #[arg(long, default_value_t = 32)]
        participants: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read_rows(path: &PathBuf) -> CliResult<Vec<cli::EnsembleRow>> {
    read_table(std::fs::File::open(path).map_err(|e| CliError::Io { path: path.clone(), message: e.to_string() })?)
}

fn run(command: Command) -> CliResult<String> {
    match command {
        Command::Parse { text, config } => cli::cmd_parse(&text, &load_lookup_config(config.as_deref())?),
        Command::Schedule { task, solver, seed, grid_start, grid_end, rate } => {
            let text = std::fs::read_to_string(&task)
                .map_err(|e| CliError::Io { path: task.clone(), message: e.to_string() })?;
            let flags = ScheduleFlags { solver, seed, grid_start, grid_end, rate };
            cli::cmd_schedule(&TaskDocument::from_json(&text)?, &flags, &load_lookup_config(None)?)
        }
        Command::Aggregate { table, instruction, group, svg } => {
            cli::cmd_aggregate(&read_rows(&table)?, &instruction, group, svg.as_deref())
        }
        Command::Fit { table, instruction, target, model, seed } => {
            let cfg = FitConfig { seed, ..FitConfig::default() };
            cli::cmd_fit(&read_rows(&table)?, &instruction, target, model, &cfg)
        }
        Command::Synth { participants, seed, out } => {
            cli::cmd_synth(&SynthConfig::new(participants, seed), &load_lookup_config(None)?, &out)
        }
    }
}

fn main() -> ExitCode {
    match run(Args::parse().command) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
