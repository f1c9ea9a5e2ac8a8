//! Python bindings: run scenarios and sweeps from JSON, aggregate CSV
//! results and build NDN names.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use vndn::experiment::{
    aggregate as aggregate_rows, expand_plan, read_csv, run_factorial, run_scenario_traced, write_csv, CsvRow,
    ExperimentError, FactorialPlan, ScenarioConfig, CSV_HEADER,
};
use vndn::ndn::schema::make_traffic_name;
use vndn::ndn::Name;

#[derive(Debug)]
enum Failure {
    Config(String),
    Run(String),
}

impl From<Failure> for PyErr {
    fn from(f: Failure) -> Self {
        match f {
            Failure::Config(m) => PyValueError::new_err(m),
            Failure::Run(m) => PyRuntimeError::new_err(m),
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Run(e.to_string())
        }
    }
}

fn config(text: &str, seed: Option<u64>) -> Result<ScenarioConfig, Failure> {
    let mut cfg = ScenarioConfig::from_json(text).map_err(|e| Failure::Config(e.to_string()))?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn csv_text(rows: &[CsvRow]) -> Result<String, Failure> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).map_err(|e| Failure::Run(e.to_string()))?;
    String::from_utf8(buf).map_err(|e| Failure::Run(e.to_string()))
}

fn run_json(text: &str, seed: Option<u64>, trace: bool) -> Result<(String, Vec<String>), Failure> {
    let cfg = config(text, seed)?;
    let out = run_scenario_traced(&cfg, trace)?;
    Ok((out.report.to_json(), out.trace))
}

fn run_csv(text: &str, seed: Option<u64>) -> Result<String, Failure> {
    let cfg = config(text, seed)?;
    let out = run_scenario_traced(&cfg, false)?;
    csv_text(&[CsvRow::from_report(0, &out.report)])
}

fn sweep_csv(plan: &str, jobs: usize) -> Result<String, Failure> {
    let plan = FactorialPlan::from_json(plan).map_err(|e| Failure::Config(e.to_string()))?;
    let runs = expand_plan(&plan, None).map_err(|e| Failure::Config(e.to_string()))?;
    csv_text(&run_factorial(&runs, jobs)?)
}

type Group = (Vec<String>, f64, f64, usize);

fn aggregate_csv(csv: &str, group_by: &[String], metric: &str) -> Result<Vec<Group>, Failure> {
    let rows = read_csv(csv.as_bytes()).map_err(|e| Failure::Config(e.to_string()))?;
    let keys: Vec<&str> = group_by.iter().map(String::as_str).collect();
    let groups = aggregate_rows(&rows, &keys, metric).map_err(|e| Failure::Config(e.to_string()))?;
    Ok(groups
        .into_iter()
        .map(|(k, s)| (k, s.mean, s.ci95_halfwidth, s.n))
        .collect())
}

/// Runs one scenario given as JSON and returns the metrics report as JSON.
/// `seed` overrides the scenario's seed.
#[pyfunction]
#[pyo3(signature = (config, seed=None))]
fn run_scenario(py: Python<'_>, config: &str, seed: Option<u64>) -> PyResult<String> {
    let (report, _) = py.detach(|| run_json(config, seed, false))?;
    Ok(report)
}

/// Like `run_scenario`, also returning the packet trace lines.
#[pyfunction]
#[pyo3(signature = (config, seed=None))]
fn run_traced(py: Python<'_>, config: &str, seed: Option<u64>) -> PyResult<(String, Vec<String>)> {
    Ok(py.detach(|| run_json(config, seed, true))?)
}

/// Runs one scenario and returns its result as CSV text with header.
#[pyfunction]
#[pyo3(signature = (config, seed=None))]
fn run_scenario_csv(py: Python<'_>, config: &str, seed: Option<u64>) -> PyResult<String> {
    Ok(py.detach(|| run_csv(config, seed))?)
}

/// Runs a full-factorial plan given as JSON and returns CSV text.
#[pyfunction]
#[pyo3(signature = (plan, jobs=1))]
fn sweep(py: Python<'_>, plan: &str, jobs: usize) -> PyResult<String> {
    Ok(py.detach(|| sweep_csv(plan, jobs))?)
}

/// Groups CSV rows and returns `(key, mean, ci95_halfwidth, n)` per group.
#[pyfunction]
fn aggregate(csv: &str, group_by: Vec<String>, metric: &str) -> PyResult<Vec<Group>> {
    Ok(aggregate_csv(csv, &group_by, metric)?)
}

/// The CSV header line.
#[pyfunction]
fn csv_header() -> &'static str {
    CSV_HEADER
}

/// Name components of an NDN URI.
#[pyfunction]
fn name_components(uri: &str) -> PyResult<Vec<String>> {
    let name = Name::parse_uri(uri).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(name
        .components()
        .iter()
        .map(|c| String::from_utf8_lossy(c).into_owned())
        .collect())
}

/// URI of the traffic report name for one road and window.
#[pyfunction]
fn traffic_name(road: &str, window: u64) -> PyResult<String> {
    make_traffic_name(road, window)
        .map(|n| n.to_uri())
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn pyvndn(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(run_traced, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario_csv, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(aggregate, m)?)?;
    m.add_function(wrap_pyfunction!(csv_header, m)?)?;
    m.add_function(wrap_pyfunction!(name_components, m)?)?;
    m.add_function(wrap_pyfunction!(traffic_name, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
