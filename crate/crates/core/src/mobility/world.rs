use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::graph::RoadGraph;
use super::stats::{EdgeStatsAcc, TrafficWindowStats};
use super::MobilityError;
use crate::ndn::schema::VehicleKind;
use crate::netsim::Position;
use crate::time::SimTime;

/// (offset, spawn sequence, speed) of each vehicle per (edge, lane), back to front.
type LaneQueues = BTreeMap<(usize, u32), Vec<(f64, u64, f64)>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VehicleColor {
    #[default]
    Default,
    ReroutedBlue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vehicle {
    pub id: String,
    pub kind: VehicleKind,
    /// Edge indices into the road graph.
    pub route: Vec<usize>,
    pub route_index: usize,
    /// Lane 0 is the rightmost lane.
    pub lane: u32,
    pub offset: f64,
    pub speed: f64,
    pub depart: SimTime,
    pub arrive: Option<SimTime>,
    pub color: VehicleColor,
    pub reroutes: u32,
    seq: u64,
}

impl Vehicle {
    pub fn current_edge(&self) -> usize {
        self.route[self.route_index]
    }

    pub fn destination_edge(&self) -> usize {
        *self.route.last().unwrap()
    }

    /// Current edge followed by the rest of the route.
    pub fn remaining(&self) -> &[usize] {
        &self.route[self.route_index..]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Incident {
    pub edge: String,
    pub t_start: SimTime,
    pub t_end: SimTime,
    pub speed_factor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripRecord {
    pub depart: SimTime,
    pub arrive: SimTime,
    pub rerouted: bool,
}

impl TripRecord {
    pub fn travel_time_s(&self) -> f64 {
        (self.arrive - self.depart).as_secs_f64()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldConfig {
    pub tick: SimTime,
    pub window: SimTime,
    pub headway_s: f64,
    pub min_gap_m: f64,
    /// Road length taken by one vehicle when computing occupancy.
    pub slot_m: f64,
    /// Concurrent vehicles the spawn policy keeps on the map.
    pub target_vehicles: usize,
    pub emergency_ratio: f64,
    /// No spawns at or after this time.
    pub spawn_until: SimTime,
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self {
            tick: SimTime::from_millis(100),
            window: SimTime::from_secs(30),
            headway_s: 1.5,
            min_gap_m: 5.0,
            slot_m: 7.5,
            target_vehicles: 0,
            emergency_ratio: 0.0,
            spawn_until: SimTime::MAX,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepEvents {
    pub spawned: Vec<String>,
    pub arrived: Vec<String>,
}

/// Native vehicle dynamics on a road graph.
#[derive(Debug, Clone)]
pub struct World {
    graph: Arc<RoadGraph>,
    cfg: WorldConfig,
    vehicles: BTreeMap<String, Vehicle>,
    incidents: Vec<Incident>,
    incident_edges: Vec<usize>,
    stats: EdgeStatsAcc,
    rng: ChaCha8Rng,
    now: SimTime,
    next_seq: u64,
    spawned: u64,
    trips: Vec<TripRecord>,
    reroutes: u64,
}

impl World {
    pub fn new(graph: Arc<RoadGraph>, cfg: WorldConfig, rng: ChaCha8Rng) -> Self {
        Self {
            graph,
            cfg,
            vehicles: BTreeMap::new(),
            incidents: Vec::new(),
            incident_edges: Vec::new(),
            stats: EdgeStatsAcc::new(cfg.window, cfg.slot_m),
            rng,
            now: SimTime::ZERO,
            next_seq: 0,
            spawned: 0,
            trips: Vec::new(),
            reroutes: 0,
        }
    }

    pub fn graph(&self) -> &Arc<RoadGraph> {
        &self.graph
    }

    pub fn config(&self) -> &WorldConfig {
        &self.cfg
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn add_incident(&mut self, incident: Incident) -> Result<(), MobilityError> {
        let idx = self
            .graph
            .edge_idx(&incident.edge)
            .ok_or_else(|| MobilityError::UnknownEdge(incident.edge.clone()))?;
        self.incident_edges.push(idx);
        self.incidents.push(incident);
        Ok(())
    }

    pub fn vehicles(&self) -> impl Iterator<Item = &Vehicle> {
        self.vehicles.values()
    }

    pub fn vehicle(&self, id: &str) -> Option<&Vehicle> {
        self.vehicles.get(id)
    }

    pub fn active_count(&self) -> usize {
        self.vehicles.len()
    }

    pub fn spawned_total(&self) -> u64 {
        self.spawned
    }

    pub fn trips(&self) -> &[TripRecord] {
        &self.trips
    }

    pub fn reroutes(&self) -> u64 {
        self.reroutes
    }

    pub fn position(&self, id: &str) -> Option<Position> {
        let v = self.vehicles.get(id)?;
        Some(self.graph.point_on_edge(v.current_edge(), v.offset))
    }

    /// Speed multiplier on `edge` at `t` from active incidents.
    pub fn incident_factor(&self, edge: usize, t: SimTime) -> f64 {
        incident_factor(&self.incidents, &self.incident_edges, edge, t)
    }

    pub fn effective_limit(&self, edge: usize, t: SimTime) -> f64 {
        self.graph.edge(edge).speed_limit * self.incident_factor(edge, t)
    }

    /// Inserts a vehicle on the first edge of `route` at the current time.
    pub fn insert_vehicle(
        &mut self,
        id: &str,
        kind: VehicleKind,
        route: &[String],
        lane: u32,
    ) -> Result<(), MobilityError> {
        let route = self.resolve_route(route)?;
        if lane >= self.graph.edge(route[0]).lanes {
            return Err(MobilityError::BadLane(lane));
        }
        self.place(id.to_string(), kind, route, lane);
        Ok(())
    }

    fn resolve_route(&self, route: &[String]) -> Result<Vec<usize>, MobilityError> {
        if route.is_empty() {
            return Err(MobilityError::RouteDiscontinuity("empty route".into()));
        }
        let idx: Vec<usize> = route
            .iter()
            .map(|e| self.graph.edge_idx(e).ok_or_else(|| MobilityError::UnknownEdge(e.clone())))
            .collect::<Result<_, _>>()?;
        for w in idx.windows(2) {
            if self.graph.edge_to(w[0]) != self.graph.edge_from(w[1]) {
                return Err(MobilityError::RouteDiscontinuity(format!(
                    "{} does not lead into {}",
                    self.graph.edge(w[0]).id,
                    self.graph.edge(w[1]).id
                )));
            }
        }
        Ok(idx)
    }

    fn place(&mut self, id: String, kind: VehicleKind, route: Vec<usize>, lane: u32) {
        let speed = self.effective_limit(route[0], self.now);
        let seq = self.next_seq;
        self.next_seq += 1;
        self.spawned += 1;
        self.vehicles.insert(
            id.clone(),
            Vehicle {
                id,
                kind,
                route,
                route_index: 0,
                lane,
                offset: 0.0,
                speed,
                depart: self.now,
                arrive: None,
                color: VehicleColor::Default,
                reroutes: 0,
                seq,
            },
        );
    }

    /// Replaces the rest of a vehicle's route. The new route must start on
    /// the current edge, be connected and end on the original destination.
    pub fn set_route(&mut self, id: &str, new_route: &[String]) -> Result<(), MobilityError> {
        let idx = self.resolve_route(new_route)?;
        let v = self
            .vehicles
            .get_mut(id)
            .ok_or_else(|| MobilityError::UnknownVehicle(id.to_string()))?;
        if idx[0] != v.current_edge() {
            return Err(MobilityError::RouteDiscontinuity("route must start on the current edge".into()));
        }
        if *idx.last().unwrap() != v.destination_edge() {
            return Err(MobilityError::RouteDiscontinuity("route must keep the destination".into()));
        }
        if idx.as_slice() == v.remaining() {
            return Ok(());
        }
        v.route.truncate(v.route_index);
        v.route.extend(idx);
        v.color = VehicleColor::ReroutedBlue;
        v.reroutes += 1;
        self.reroutes += 1;
        Ok(())
    }

    pub fn set_lane(&mut self, id: &str, lane: u32) -> Result<(), MobilityError> {
        let lanes = {
            let v = self
                .vehicles
                .get(id)
                .ok_or_else(|| MobilityError::UnknownVehicle(id.to_string()))?;
            self.graph.edge(v.current_edge()).lanes
        };
        if lane >= lanes {
            return Err(MobilityError::BadLane(lane));
        }
        self.vehicles.get_mut(id).unwrap().lane = lane;
        Ok(())
    }

    /// Advances the world by one tick: move, retire arrivals, spawn.
    pub fn step(&mut self) -> StepEvents {
        let t0 = self.now;
        let dt = self.cfg.tick;
        let t1 = t0 + dt;
        let arrived = self.advance(t0, dt);
        self.now = t1;
        let spawned = if t1 < self.cfg.spawn_until {
            self.spawn()
        } else {
            Vec::new()
        };
        StepEvents { spawned, arrived }
    }

    /// Spawns up to the target at the current time, without moving anyone.
    pub fn spawn_initial(&mut self) -> StepEvents {
        StepEvents {
            spawned: self.spawn(),
            arrived: Vec::new(),
        }
    }

    fn lane_queues(&self) -> LaneQueues {
        let mut q: LaneQueues = BTreeMap::new();
        for v in self.vehicles.values() {
            q.entry((v.current_edge(), v.lane)).or_default().push((v.offset, v.seq, v.speed));
        }
        for list in q.values_mut() {
            // ascending offset; at equal offsets the earlier vehicle is ahead
            list.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
        }
        q
    }

    /// (gap to leader, leader speed) for a vehicle, looking one edge ahead.
    fn leader(&self, v: &Vehicle, queues: &LaneQueues) -> Option<(f64, f64)> {
        let edge = v.current_edge();
        let list = &queues[&(edge, v.lane)];
        let pos = list.iter().position(|e| e.1 == v.seq).unwrap();
        if let Some(&(off, _, spd)) = list.get(pos + 1) {
            return Some((off - v.offset, spd));
        }
        let next = *v.route.get(v.route_index + 1)?;
        let lane = v.lane.min(self.graph.edge(next).lanes - 1);
        let &(off, _, spd) = queues.get(&(next, lane))?.first()?;
        Some((self.graph.edge(edge).length - v.offset + off, spd))
    }

    fn advance(&mut self, t0: SimTime, dt: SimTime) -> Vec<String> {
        let dts = dt.as_secs_f64();
        let queues = self.lane_queues();
        let mut speeds = Vec::with_capacity(self.vehicles.len());
        for v in self.vehicles.values() {
            let mut speed = self.effective_limit(v.current_edge(), t0);
            if let Some((gap, lead_speed)) = self.leader(v, &queues) {
                if gap < v.speed * self.cfg.headway_s + self.cfg.min_gap_m {
                    speed = speed.min(lead_speed);
                }
                // never pass the leader within one tick
                let cap = (gap / dts + lead_speed).max(0.0);
                speed = speed.min(cap);
            }
            speeds.push(speed);
        }

        let mut arrived = Vec::new();
        let t1 = t0 + dt;
        let ids: Vec<String> = self.vehicles.keys().cloned().collect();
        for (id, speed) in ids.into_iter().zip(speeds) {
            let edge = self.vehicles[&id].current_edge();
            self.stats.record(edge, t0, dt, speed);

            let v = self.vehicles.get_mut(&id).unwrap();
            v.speed = speed;
            v.offset += speed * dts;
            loop {
                let len = self.graph.edge(v.current_edge()).length;
                if v.offset < len {
                    break;
                }
                if v.route_index + 1 == v.route.len() {
                    v.offset = len;
                    v.arrive = Some(t1);
                    break;
                }
                v.offset -= len;
                v.route_index += 1;
                let next = v.current_edge();
                v.lane = v.lane.min(self.graph.edge(next).lanes - 1);
                let limit = self.graph.edge(next).speed_limit
                    * incident_factor(&self.incidents, &self.incident_edges, next, t1);
                v.speed = v.speed.min(limit);
            }
            if v.arrive.is_some() {
                arrived.push(id);
            }
        }
        for id in &arrived {
            let v = self.vehicles.remove(id).unwrap();
            self.trips.push(TripRecord {
                depart: v.depart,
                arrive: v.arrive.unwrap(),
                rerouted: v.reroutes > 0,
            });
        }
        arrived
    }

    fn spawn(&mut self) -> Vec<String> {
        let mut out = Vec::new();
        let n_j = self.graph.junctions().len();
        if n_j < 2 {
            return out;
        }
        let deficit = self.cfg.target_vehicles.saturating_sub(self.vehicles.len());
        for _ in 0..deficit {
            let from = self.rng.random_range(0..n_j);
            let mut to = self.rng.random_range(0..n_j);
            while to == from {
                to = self.rng.random_range(0..n_j);
            }
            let kind = if self.cfg.emergency_ratio > 0.0 && self.rng.random::<f64>() < self.cfg.emergency_ratio {
                VehicleKind::Emergency
            } else {
                VehicleKind::Passenger
            };
            let Some((route, _)) = self.graph.route_between(from, to, |e| e.free_flow_time()) else {
                continue;
            };
            let first = route[0];
            let clear = (0..self.graph.edge(first).lanes).find(|&lane| {
                !self
                    .vehicles
                    .values()
                    .any(|v| v.current_edge() == first && v.lane == lane && v.offset < self.cfg.slot_m)
            });
            let Some(lane) = clear else {
                continue;
            };
            let id = format!("veh{}", self.next_seq);
            self.place(id.clone(), kind, route, lane);
            out.push(id);
        }
        out
    }

    /// Traffic statistics of `edge` for window `window`. The in-progress
    /// window is normalised by the time elapsed in it so far.
    pub fn edge_stats(&self, edge: &str, window: u64) -> Result<TrafficWindowStats, MobilityError> {
        let idx = self
            .graph
            .edge_idx(edge)
            .ok_or_else(|| MobilityError::UnknownEdge(edge.to_string()))?;
        Ok(self.edge_stats_idx(idx, window))
    }

    pub fn edge_stats_idx(&self, idx: usize, window: u64) -> TrafficWindowStats {
        self.stats.stats(idx, self.graph.edge(idx), window, self.now)
    }

    pub fn window_index(&self, t: SimTime) -> u64 {
        self.stats.window_index(t)
    }
}

fn incident_factor(incidents: &[Incident], edges: &[usize], edge: usize, t: SimTime) -> f64 {
    incidents
        .iter()
        .zip(edges)
        .filter(|(i, e)| **e == edge && i.t_start <= t && t < i.t_end)
        .map(|(i, _)| i.speed_factor)
        .fold(1.0, f64::min)
}
