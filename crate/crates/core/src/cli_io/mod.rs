//! Configuration files, command dispatch and on-disk artifacts.

mod config;
mod run;

pub use config::{
    parse_config, Command, EvolveSection, GridConfig, ProbeConfig, ProbeKind, ProblemConfig,
    RunConfig, SolverConfig,
};
pub use run::{run, solution_record, write_table, Outcome, SolutionRecord};
