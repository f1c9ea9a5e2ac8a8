use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use vndn::experiment::{
    expand_plan, run_factorial, run_scenario_traced, write_csv, CsvRow, ExperimentError, FactorialPlan,
    ScenarioConfig,
};
use vndn::mobility::{generate_grid, generate_highway};

const EXIT_CONFIG: u8 = 2;
const EXIT_RUN: u8 = 3;

#[derive(Parser)]
#[command(name = "vndn", version, about = "Vehicular NDN discrete-event simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also write the packet trace.
        #[arg(long)]
        trace: bool,
    },
    /// Run a full-factorial plan.
    Sweep {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = default_jobs())]
        jobs: usize,
    },
    /// Write a generated road network as JSON.
    GenMap {
        #[command(subcommand)]
        kind: MapKind,
    },
}

#[derive(Subcommand)]
enum MapKind {
    Grid {
        #[arg(long)]
        rows: u32,
        #[arg(long)]
        cols: u32,
        /// Block length in meters.
        #[arg(long)]
        block: f64,
        #[arg(long, default_value_t = 13.9)]
        speed_limit: f64,
        #[arg(long, default_value_t = 1)]
        lanes: u32,
        #[arg(long)]
        out: PathBuf,
    },
    Highway {
        /// Length in meters.
        #[arg(long)]
        length: f64,
        #[arg(long)]
        lanes: u32,
        #[arg(long, default_value_t = 27.8)]
        speed_limit: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

enum Failure {
    Config(String),
    Run(String),
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

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::Run(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, bytes).map_err(|e| Failure::Run(format!("{}: {e}", path.display())))
}

fn csv_bytes(rows: &[CsvRow]) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).map_err(|e| Failure::Run(e.to_string()))?;
    Ok(buf)
}

fn run(scenario: &Path, seed: u64, out: &Path, trace: bool) -> Result<(), Failure> {
    let mut cfg = ScenarioConfig::load(scenario).map_err(|e| Failure::Config(e.to_string()))?;
    cfg.seed = seed;
    let output = run_scenario_traced(&cfg, trace)?;
    write_file(&out.join("results.csv"), &csv_bytes(&[CsvRow::from_report(0, &output.report)])?)?;
    write_file(&out.join("report.json"), output.report.to_json().as_bytes())?;
    if trace {
        let mut text = output.trace.join("\n");
        if !text.is_empty() {
            text.push('\n');
        }
        write_file(&out.join("trace.txt"), text.as_bytes())?;
    }
    eprintln!(
        "seed {seed}: {} packets, satisfaction {:.3}, {} trips",
        output.report.total_packets, output.report.satisfaction_ratio, output.report.completed_trips
    );
    Ok(())
}

fn sweep(plan_path: &Path, out: &Path, jobs: usize) -> Result<(), Failure> {
    let plan = FactorialPlan::load(plan_path).map_err(|e| Failure::Config(e.to_string()))?;
    let runs = expand_plan(&plan, plan_path.parent()).map_err(|e| Failure::Config(e.to_string()))?;
    eprintln!("{} runs on {jobs} thread(s)", runs.len());
    let rows = run_factorial(&runs, jobs)?;
    write_file(&out.join("results.csv"), &csv_bytes(&rows)?)?;
    Ok(())
}

fn gen_map(kind: MapKind) -> Result<(), Failure> {
    let (graph, out) = match kind {
        MapKind::Grid {
            rows,
            cols,
            block,
            speed_limit,
            lanes,
            out,
        } => {
            if rows < 2 || cols < 2 || !(block > 0.0) || lanes == 0 {
                return Err(Failure::Config("grid needs rows, cols >= 2, block > 0, lanes >= 1".into()));
            }
            (generate_grid(rows, cols, block, speed_limit, lanes), out)
        }
        MapKind::Highway {
            length,
            lanes,
            speed_limit,
            out,
        } => {
            if !(length > 0.0) || lanes == 0 {
                return Err(Failure::Config("highway needs length > 0 and lanes >= 1".into()));
            }
            (generate_highway(length, lanes, speed_limit), out)
        }
    };
    let graph = graph.map_err(|e| Failure::Config(e.to_string()))?;
    let mut json = graph.to_json();
    json.push('\n');
    write_file(&out, json.as_bytes())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Run {
            scenario,
            seed,
            out,
            trace,
        } => run(&scenario, seed, &out, trace),
        Cmd::Sweep { plan, out, jobs } => sweep(&plan, &out, jobs),
        Cmd::GenMap { kind } => gen_map(kind),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("run failed: {msg}");
            ExitCode::from(EXIT_RUN)
        }
    }
}
