use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::ScenarioConfig;
use super::results::CsvRow;
use super::run::run_scenario;
use super::{ConfigError, ExperimentError};

/// Full-factorial sweep: every combination of factor levels, each
/// replicated `replications` times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorialPlan {
    /// Scenario fields shared by all runs; `seed` may be omitted.
    pub base: Value,
    /// Scenario field name → levels.
    pub factors: BTreeMap<String, Vec<Value>>,
    pub replications: usize,
    pub seed_base: u64,
}

/// One concrete run of a plan.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannedRun {
    pub run_id: u64,
    pub replication: usize,
    pub config: ScenarioConfig,
}

fn invalid(field: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        msg: msg.into(),
    }
}

impl FactorialPlan {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Parse {
            field: e.path().to_string(),
            msg: e.inner().to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    /// Number of runs: product of level counts times replications.
    pub fn run_count(&self) -> usize {
        self.factors.values().map(Vec::len).product::<usize>() * self.replications
    }
}

/// Expands a plan in deterministic order: factors by name, levels as
/// listed, replication innermost. Run `i` gets seed `seed_base + i`.
/// Relative paths in the base are resolved against `dir`.
pub fn expand_plan(plan: &FactorialPlan, dir: Option<&Path>) -> Result<Vec<PlannedRun>, ConfigError> {
    let Value::Object(base) = &plan.base else {
        return Err(invalid("base", "must be an object"));
    };
    if plan.replications == 0 {
        return Err(invalid("replications", "must be >= 1"));
    }
    for (name, levels) in &plan.factors {
        if levels.is_empty() {
            return Err(invalid(&format!("factors.{name}"), "needs at least one level"));
        }
        if name == "seed" {
            return Err(invalid("factors.seed", "seeds come from seed_base"));
        }
    }
    let names: Vec<&String> = plan.factors.keys().collect();
    let mut idx = vec![0usize; names.len()];
    let mut runs = Vec::with_capacity(plan.run_count());
    loop {
        for rep in 0..plan.replications {
            let run_id = runs.len() as u64;
            let mut obj = base.clone();
            for (k, name) in names.iter().enumerate() {
                obj.insert((*name).clone(), plan.factors[*name][idx[k]].clone());
            }
            obj.insert("seed".into(), Value::from(plan.seed_base + run_id));
            let mut config: ScenarioConfig = serde_path_to_error::deserialize(Value::Object(obj)).map_err(|e| {
                ConfigError::Parse {
                    field: format!("run {run_id}: {}", e.path()),
                    msg: e.inner().to_string(),
                }
            })?;
            if let Some(d) = dir {
                config.resolve_paths(d);
            }
            config.validate()?;
            runs.push(PlannedRun {
                run_id,
                replication: rep,
                config,
            });
        }
        // odometer over factor levels, last factor fastest
        let mut k = names.len();
        loop {
            if k == 0 {
                return Ok(runs);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < plan.factors[names[k]].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Runs every planned run, `jobs` at a time, and returns rows in run order.
/// The first failure aborts the sweep and names its seed.
pub fn run_factorial(runs: &[PlannedRun], jobs: usize) -> Result<Vec<CsvRow>, ExperimentError> {
    let work = || -> Result<Vec<CsvRow>, ExperimentError> {
        let mut rows: Vec<CsvRow> = runs
            .par_iter()
            .map(|r| run_scenario(&r.config).map(|rep| CsvRow::from_report(r.run_id, &rep)))
            .collect::<Result<_, _>>()?;
        rows.sort_by_key(|r| r.run_id);
        Ok(rows)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    pool.install(work)
}
