//! Road networks, vehicle dynamics, traffic statistics and trace replay.

mod fcd;
mod graph;
mod stats;
mod world;

use std::sync::Arc;

use thiserror::Error;

pub use fcd::{split_lane, FcdSample, FcdTrace, Replay};
pub use graph::{generate_grid, generate_highway, grid_junction_id, Edge, GraphError, Junction, RoadGraph};
pub use stats::{EdgeStatsAcc, TrafficWindowStats};
pub use world::{Incident, StepEvents, TripRecord, Vehicle, VehicleColor, World, WorldConfig};

use crate::ndn::schema::VehicleKind;
use crate::netsim::Position;
use crate::time::SimTime;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MobilityError {
    #[error("unknown edge {0:?}")]
    UnknownEdge(String),
    #[error("unknown vehicle {0:?}")]
    UnknownVehicle(String),
    #[error("route discontinuity: {0}")]
    RouteDiscontinuity(String),
    #[error("lane {0} does not exist on the current edge")]
    BadLane(u32),
    #[error("routes and lanes cannot be changed while replaying a trace")]
    RerouteUnsupportedInReplay,
    #[error("line {line}: {msg}")]
    Parse { line: u32, msg: String },
}

/// What applications may read about a vehicle.
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleView {
    pub kind: VehicleKind,
    pub edge: String,
    pub lane: u32,
    pub speed: f64,
    pub position: Position,
    /// Current edge followed by the rest of the route; empty in replay.
    pub remaining: Vec<String>,
}

/// The mobility side of the simulation: native dynamics or trace replay.
#[derive(Debug, Clone)]
pub enum Mobility {
    Native(World),
    Replay(Replay),
}

impl Mobility {
    /// No moving vehicles at all; for networks of static nodes.
    pub fn stationary(tick: SimTime) -> Self {
        Mobility::Replay(Replay::new(FcdTrace::default(), None, tick, SimTime::from_secs(30), 7.5))
    }

    pub fn now(&self) -> SimTime {
        match self {
            Mobility::Native(w) => w.now(),
            Mobility::Replay(r) => r.now(),
        }
    }

    pub fn spawn_initial(&mut self) -> StepEvents {
        match self {
            Mobility::Native(w) => w.spawn_initial(),
            Mobility::Replay(r) => r.spawn_initial(),
        }
    }

    pub fn step(&mut self) -> StepEvents {
        match self {
            Mobility::Native(w) => w.step(),
            Mobility::Replay(r) => r.step(),
        }
    }

    pub fn graph(&self) -> Option<&Arc<RoadGraph>> {
        match self {
            Mobility::Native(w) => Some(w.graph()),
            Mobility::Replay(r) => r.graph(),
        }
    }

    pub fn position(&self, id: &str) -> Option<Position> {
        match self {
            Mobility::Native(w) => w.position(id),
            Mobility::Replay(r) => r.position(id),
        }
    }

    pub fn view(&self, id: &str) -> Option<VehicleView> {
        match self {
            Mobility::Native(w) => {
                let v = w.vehicle(id)?;
                let g = w.graph();
                Some(VehicleView {
                    kind: v.kind,
                    edge: g.edge(v.current_edge()).id.clone(),
                    lane: v.lane,
                    speed: v.speed,
                    position: w.position(id)?,
                    remaining: g.ids(v.remaining()),
                })
            }
            Mobility::Replay(r) => {
                let (edge, lane) = r.lane(id)?;
                Some(VehicleView {
                    kind: r.kind(id)?,
                    edge,
                    lane,
                    speed: r.speed(id)?,
                    position: r.position(id)?,
                    remaining: Vec::new(),
                })
            }
        }
    }

    pub fn set_route(&mut self, id: &str, route: &[String]) -> Result<(), MobilityError> {
        match self {
            Mobility::Native(w) => w.set_route(id, route),
            Mobility::Replay(_) => Err(MobilityError::RerouteUnsupportedInReplay),
        }
    }

    pub fn set_lane(&mut self, id: &str, lane: u32) -> Result<(), MobilityError> {
        match self {
            Mobility::Native(w) => w.set_lane(id, lane),
            Mobility::Replay(_) => Err(MobilityError::RerouteUnsupportedInReplay),
        }
    }

    pub fn edge_stats(&self, edge: &str, window: u64) -> Result<TrafficWindowStats, MobilityError> {
        match self {
            Mobility::Native(w) => w.edge_stats(edge, window),
            Mobility::Replay(r) => r.edge_stats(edge, window),
        }
    }

    pub fn window_index(&self, t: SimTime) -> u64 {
        match self {
            Mobility::Native(w) => w.window_index(t),
            Mobility::Replay(r) => r.window_index(t),
        }
    }

    pub fn trips(&self) -> &[TripRecord] {
        match self {
            Mobility::Native(w) => w.trips(),
            Mobility::Replay(r) => r.trips(),
        }
    }

    pub fn spawned_total(&self) -> u64 {
        match self {
            Mobility::Native(w) => w.spawned_total(),
            Mobility::Replay(r) => r.spawned_total(),
        }
    }

    pub fn active_count(&self) -> usize {
        match self {
            Mobility::Native(w) => w.active_count(),
            Mobility::Replay(r) => r.active_count(),
        }
    }

    pub fn reroutes(&self) -> u64 {
        match self {
            Mobility::Native(w) => w.reroutes(),
            Mobility::Replay(_) => 0,
        }
    }
}
