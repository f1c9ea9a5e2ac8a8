use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use super::config::{MapSpec, ScenarioConfig, StrategyLevel};
use super::{ConfigError, ExperimentError};
use crate::forwarder::ForwarderConfig;
use crate::mobility::{
    generate_grid, generate_highway, FcdTrace, Incident, Mobility, Replay, RoadGraph, World, WorldConfig,
};
use crate::netsim::Position;
use crate::sim::{rng_stream, AppSpec, NodeRole, SimConfig, Simulation, StaticNode, STREAM_MOBILITY};
use crate::time::SimTime;

/// Scalars of one finished run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub seed: u64,
    pub strategy: StrategyLevel,
    pub density: f64,
    pub n_rsus: usize,
    pub cache_size: usize,
    pub interests_sent: u64,
    pub data_sent: u64,
    pub nacks_sent: u64,
    pub total_packets: u64,
    pub cs_hits: u64,
    pub drops_scope: u64,
    pub drops_duplicate: u64,
    pub drops_unsolicited: u64,
    pub nacks_absorbed: u64,
    pub suppressed: u64,
    pub frames_sent: u64,
    /// Tracked application interests (beacons excluded).
    pub app_interests: u64,
    pub app_data: u64,
    pub app_nacks: u64,
    pub app_timeouts: u64,
    /// `app_data / app_interests`; 0 when nothing was expressed.
    pub satisfaction_ratio: f64,
    pub travel_times_s: Vec<f64>,
    pub completed_trips: u64,
    pub mean_travel_time_s: f64,
    /// Sample standard deviation; 0 with fewer than two trips.
    pub std_travel_time_s: f64,
    pub reroutes: u64,
    pub spawned: u64,
    pub active_at_end: u64,
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug)]
pub struct RunOutput {
    pub report: MetricsReport,
    /// Packet trace lines, empty unless requested.
    pub trace: Vec<String>,
}

fn invalid(field: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        msg: msg.into(),
    }
}

pub fn build_graph(map: &MapSpec) -> Result<RoadGraph, ConfigError> {
    let g = match map {
        MapSpec::Grid {
            rows,
            cols,
            block_m,
            speed_limit,
            lanes,
        } => generate_grid(*rows, *cols, *block_m, *speed_limit, *lanes),
        MapSpec::Highway {
            length_m,
            lanes,
            speed_limit,
        } => generate_highway(*length_m, *lanes, *speed_limit),
        MapSpec::File { path } => RoadGraph::load(path),
    };
    g.map_err(|e| invalid("map", e.to_string()))
}

fn default_incident_edge(g: &RoadGraph) -> Option<String> {
    let (x0, y0, x1, y1) = g.bounds();
    let center = Position::new((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    let j = g
        .junctions()
        .iter()
        .min_by(|a, b| {
            let da = Position::new(a.x, a.y).distance(&center);
            let db = Position::new(b.x, b.y).distance(&center);
            da.total_cmp(&db)
        })?
        .id
        .clone();
    g.edges().iter().find(|e| e.from == j).map(|e| e.id.clone())
}

fn rsu_positions(cfg: &ScenarioConfig, g: &RoadGraph) -> Vec<Position> {
    if let Some(p) = &cfg.rsu_positions {
        return p.iter().map(|[x, y]| Position::new(*x, *y)).collect();
    }
    let (x0, y0, x1, y1) = g.bounds();
    let n = cfg.n_rsus;
    (0..n)
        .map(|i| {
            let f = (i + 1) as f64 / (n + 1) as f64;
            Position::new(x0 + (x1 - x0) * f, y0 + (y1 - y0) * f)
        })
        .collect()
}

fn monitored_by(cfg: &ScenarioConfig, g: &RoadGraph, pos: &Position) -> Result<BTreeSet<String>, ConfigError> {
    if let Some(list) = &cfg.monitored_edges {
        for (i, e) in list.iter().enumerate() {
            if g.edge_idx(e).is_none() {
                return Err(invalid(&format!("monitored_edges[{i}]"), format!("unknown edge {e:?}")));
            }
        }
        return Ok(list.iter().cloned().collect());
    }
    Ok((0..g.edges().len())
        .filter(|&i| g.distance_to_edge(i, pos) <= cfg.radio.range_m)
        .map(|i| g.edge(i).id.clone())
        .collect())
}

/// Wires a scenario into a ready-to-run simulation.
pub fn build_simulation(cfg: &ScenarioConfig, trace: bool) -> Result<Simulation, ConfigError> {
    cfg.validate()?;
    let graph = Arc::new(build_graph(&cfg.map)?);
    let tick = SimTime::from_millis(cfg.tick_ms);
    let window = SimTime::from_millis(cfg.tms.window_ms);
    let slot_m = WorldConfig::default().slot_m;

    let (mobility, capacity) = match &cfg.fcd {
        Some(path) => {
            if !cfg.incidents.is_empty() {
                return Err(invalid("incidents", "incidents need native mobility, not trace replay"));
            }
            let trace = FcdTrace::load(path).map_err(|e| invalid("fcd", e.to_string()))?;
            let peak = trace.steps.iter().map(|(_, s)| s.len()).max().unwrap_or(0);
            let replay = Replay::new(trace, Some(Arc::clone(&graph)), tick, window, slot_m);
            (Mobility::Replay(replay), peak)
        }
        None => {
            let target = cfg
                .target_vehicles
                .unwrap_or_else(|| (cfg.density * graph.area_km2()).round() as usize);
            let wc = WorldConfig {
                tick,
                window,
                target_vehicles: target,
                emergency_ratio: cfg.emergency_ratio,
                ..WorldConfig::default()
            };
            let mut world = World::new(Arc::clone(&graph), wc, rng_stream(cfg.seed, STREAM_MOBILITY));
            for (i, inc) in cfg.incidents.iter().enumerate() {
                let edge = match &inc.edge {
                    Some(e) => e.clone(),
                    None => default_incident_edge(&graph)
                        .ok_or_else(|| invalid(&format!("incidents[{i}].edge"), "map has no edges"))?,
                };
                world
                    .add_incident(Incident {
                        edge,
                        t_start: SimTime::from_millis_f64(inc.t_start_s * 1000.0),
                        t_end: SimTime::from_millis_f64(inc.t_end_s * 1000.0),
                        speed_factor: inc.speed_factor,
                    })
                    .map_err(|e| invalid(&format!("incidents[{i}].edge"), e.to_string()))?;
            }
            (Mobility::Native(world), target)
        }
    };

    let mut vehicle_apps = Vec::new();
    if let Some(b) = cfg.beacon {
        vehicle_apps.push(AppSpec::Beacon(b));
    }
    let tms_on = cfg.strategy != StrategyLevel::None;
    if tms_on {
        vehicle_apps.push(AppSpec::TmsConsumer(cfg.tms));
    }

    let mut statics = Vec::new();
    for (i, pos) in rsu_positions(cfg, &graph).into_iter().enumerate() {
        let mut node = StaticNode::new(&format!("rsu{i}"), pos, NodeRole::Rsu);
        if tms_on {
            node = node.with_app(AppSpec::TmsProducer {
                cfg: cfg.tms,
                monitored: monitored_by(cfg, &graph, &pos)?,
            });
        }
        statics.push(node);
    }
    for (i, p) in cfg.parked.iter().enumerate() {
        for (k, e) in p.route.iter().enumerate() {
            if graph.edge_idx(e).is_none() {
                return Err(invalid(&format!("parked[{i}].route[{k}]"), format!("unknown edge {e:?}")));
            }
        }
        let mut node = StaticNode::new(&p.id, Position::new(p.x, p.y), NodeRole::Vehicle);
        node.road = p.route.first().cloned().unwrap_or_default();
        node.route = p.route.clone();
        node.lane = p.lane;
        for app in &vehicle_apps {
            node = node.with_app(app.clone());
        }
        statics.push(node);
    }

    let sim_cfg = SimConfig {
        forwarder: ForwarderConfig {
            strategy: cfg.strategy.forwarder(),
            cs_capacity: cfg.cache_size,
            vanet_jitter_max: SimTime::from_millis_f64(cfg.vanet_jitter_ms),
            ..ForwarderConfig::default()
        },
        radio: cfg.radio,
        duration: SimTime::from_millis_f64(cfg.duration_s * 1000.0),
        tick,
        pool_capacity: capacity + 1,
        trace,
        vehicle_apps,
        seed: cfg.seed,
    };
    Simulation::new(sim_cfg, mobility, statics).map_err(|e| invalid("apps", e.to_string()))
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Collects the report of a finished simulation.
pub fn report(cfg: &ScenarioConfig, sim: &Simulation) -> MetricsReport {
    let c = sim.counters_total();
    let t = sim.tally_total();
    let travel: Vec<f64> = sim.mobility().trips().iter().map(|r| r.travel_time_s()).collect();
    let (mean, std) = mean_std(&travel);
    MetricsReport {
        seed: cfg.seed,
        strategy: cfg.strategy,
        density: cfg.density,
        n_rsus: cfg.n_rsus,
        cache_size: cfg.cache_size,
        interests_sent: c.interests_sent,
        data_sent: c.data_sent,
        nacks_sent: c.nacks_sent,
        total_packets: c.total_packets(),
        cs_hits: c.cs_hits,
        drops_scope: c.drops_scope,
        drops_duplicate: c.drops_duplicate,
        drops_unsolicited: c.drops_unsolicited,
        nacks_absorbed: c.nacks_absorbed,
        suppressed: c.suppressed,
        frames_sent: sim.frames_sent(),
        app_interests: t.expressed,
        app_data: t.data,
        app_nacks: t.nack,
        app_timeouts: t.timeout,
        satisfaction_ratio: t.satisfaction().unwrap_or(0.0),
        completed_trips: travel.len() as u64,
        travel_times_s: travel,
        mean_travel_time_s: mean,
        std_travel_time_s: std,
        reroutes: sim.mobility().reroutes(),
        spawned: sim.mobility().spawned_total(),
        active_at_end: sim.mobility().active_count() as u64,
    }
}

pub fn run_scenario_traced(cfg: &ScenarioConfig, trace: bool) -> Result<RunOutput, ExperimentError> {
    let mut sim = build_simulation(cfg, trace)?;
    sim.run().map_err(|source| ExperimentError::Run { seed: cfg.seed, source })?;
    Ok(RunOutput {
        report: report(cfg, &sim),
        trace: sim.take_trace(),
    })
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<MetricsReport, ExperimentError> {
    run_scenario_traced(cfg, false).map(|o| o.report)
}
