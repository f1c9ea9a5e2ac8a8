//! Scenario configuration, single runs, factorial sweeps and result tables.

mod config;
mod factorial;
mod results;
mod run;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{IncidentSpec, MapSpec, ParkedVehicle, ScenarioConfig, StrategyLevel};
pub use factorial::{expand_plan, run_factorial, FactorialPlan, PlannedRun};
pub use results::{
    aggregate, read_csv, summarize, write_csv, AggregateError, CsvRow, Summary, CSV_HEADER,
};
pub use run::{build_graph, build_simulation, report, run_scenario, run_scenario_traced, MetricsReport, RunOutput};

use crate::sim::SimError;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{field}: {msg}")]
    Parse { field: String, msg: String },
    #[error("{field}: {msg}")]
    Invalid { field: String, msg: String },
    #[error("{}: {msg}", path.display())]
    Io { path: PathBuf, msg: String },
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("run with seed {seed} failed: {source}")]
    Run {
        seed: u64,
        #[source]
        source: SimError,
    },
}

impl ExperimentError {
    pub fn is_config(&self) -> bool {
        matches!(self, ExperimentError::Config(_))
    }
}
