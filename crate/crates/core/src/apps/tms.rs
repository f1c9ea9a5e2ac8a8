use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{AppAction, AppContext};
use crate::mobility::{RoadGraph, TrafficWindowStats};
use crate::ndn::schema::{make_traffic_name, parse_traffic_name};
use crate::ndn::{Data, Interest};
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TmsConfig {
    pub query_interval_ms: u64,
    /// Congested when mean speed falls below this fraction of the limit.
    pub congestion_speed_ratio: f64,
    /// Congested when occupancy rises above this.
    pub congestion_occupancy: f64,
    pub improvement_margin: f64,
    pub window_ms: u64,
    pub interest_lifetime_ms: u32,
}

impl Default for TmsConfig {
    fn default() -> Self {
        Self {
            query_interval_ms: 5000,
            congestion_speed_ratio: 0.5,
            congestion_occupancy: 0.8,
            improvement_margin: 0.10,
            window_ms: 30_000,
            interest_lifetime_ms: 2000,
        }
    }
}

impl TmsConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.congestion_speed_ratio > 0.0 && self.congestion_speed_ratio < 1.0) {
            return Err("congestion_speed_ratio must be in (0, 1)".into());
        }
        if !(self.congestion_occupancy > 0.0 && self.congestion_occupancy <= 1.0) {
            return Err("congestion_occupancy must be in (0, 1]".into());
        }
        if !(self.improvement_margin >= 0.0) {
            return Err("improvement_margin must be >= 0".into());
        }
        if self.query_interval_ms == 0 || self.window_ms == 0 || self.interest_lifetime_ms == 0 {
            return Err("intervals and lifetimes must be > 0".into());
        }
        Ok(())
    }

    /// Entries older than two windows are stale.
    pub fn staleness_horizon(&self) -> SimTime {
        SimTime::from_millis(2 * self.window_ms)
    }
}

/// JSON payload of a traffic Data packet. Field order is the wire order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficPayload {
    pub road: String,
    pub window: u64,
    #[serde(rename = "meanSpeed")]
    pub mean_speed: f64,
    pub occupancy: f64,
    #[serde(rename = "sampleCount")]
    pub sample_count: u64,
}

impl TrafficPayload {
    pub fn new(road: &str, s: &TrafficWindowStats) -> Self {
        Self {
            road: road.to_string(),
            window: s.window,
            mean_speed: s.mean_speed,
            occupancy: s.occupancy,
            sample_count: s.sample_count,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("payload serialises")
    }

    /// Unknown keys are ignored; any missing key makes the payload malformed.
    pub fn from_json(bytes: &[u8]) -> Result<Self, serde_json::Error> {
        serde_json::from_slice(bytes)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViewEntry {
    pub payload: TrafficPayload,
    pub received: SimTime,
}

/// Latest traffic report per edge, as known to one consumer.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrafficView {
    entries: BTreeMap<String, ViewEntry>,
}

impl TrafficView {
    pub fn update(&mut self, payload: TrafficPayload, now: SimTime) {
        let newer = self
            .entries
            .get(&payload.road)
            .is_none_or(|e| e.payload.window <= payload.window);
        if newer {
            self.entries.insert(payload.road.clone(), ViewEntry { payload, received: now });
        }
    }

    /// The entry for `edge` if younger than `horizon`.
    pub fn fresh(&self, edge: &str, now: SimTime, horizon: SimTime) -> Option<&TrafficPayload> {
        self.entries
            .get(edge)
            .filter(|e| now.saturating_sub(e.received) < horizon)
            .map(|e| &e.payload)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// RSU side: answers traffic queries for the edges it monitors.
#[derive(Debug, Clone)]
pub struct TmsProducer {
    cfg: TmsConfig,
    monitored: BTreeSet<String>,
    pub served: u64,
    pub ignored: u64,
}

impl TmsProducer {
    pub fn new(cfg: TmsConfig, monitored: BTreeSet<String>) -> Self {
        Self {
            cfg,
            monitored,
            served: 0,
            ignored: 0,
        }
    }

    pub fn monitored(&self) -> &BTreeSet<String> {
        &self.monitored
    }

    pub fn on_interest(&mut self, ctx: &mut AppContext, interest: &Interest) -> Vec<AppAction> {
        let Ok((road, window)) = parse_traffic_name(&interest.name) else {
            self.ignored += 1;
            return Vec::new();
        };
        let current = ctx.mobility.window_index(ctx.now);
        if !self.monitored.contains(&road) || window > current {
            self.ignored += 1;
            return Vec::new();
        }
        let Ok(stats) = ctx.mobility.edge_stats(&road, window) else {
            self.ignored += 1;
            return Vec::new();
        };
        self.served += 1;
        let payload = TrafficPayload::new(&road, &stats).to_json();
        let freshness = u32::try_from(self.cfg.window_ms).unwrap_or(u32::MAX);
        vec![AppAction::PutData(Data::new(interest.name.clone(), payload, freshness))]
    }
}

/// Vehicle side: queries the edges ahead and reroutes around congestion.
#[derive(Debug, Clone)]
pub struct TmsConsumer {
    cfg: TmsConfig,
    pub view: TrafficView,
    outstanding: BTreeSet<String>,
    pub queries: u64,
    pub malformed: u64,
    pub reroutes: u64,
}

impl TmsConsumer {
    pub fn new(cfg: TmsConfig) -> Self {
        Self {
            cfg,
            view: TrafficView::default(),
            outstanding: BTreeSet::new(),
            queries: 0,
            malformed: 0,
            reroutes: 0,
        }
    }

    pub fn start(&mut self, ctx: &mut AppContext) -> Vec<AppAction> {
        // small random offset so consumers spawned together do not query in lockstep
        let jitter = ctx.rng.random_range(0..SimTime::from_millis(100).as_micros());
        vec![AppAction::Timer {
            delay: SimTime::from_micros(jitter),
            tag: 0,
        }]
    }

    pub fn on_timer(&mut self, ctx: &mut AppContext) -> Vec<AppAction> {
        let mut out = self.tick(ctx);
        out.push(AppAction::Timer {
            delay: SimTime::from_millis(self.cfg.query_interval_ms),
            tag: 0,
        });
        out
    }

    /// One query round: an interest for every upcoming edge that has no
    /// fresh report and no query in flight.
    pub fn tick(&mut self, ctx: &mut AppContext) -> Vec<AppAction> {
        let Some(v) = ctx.vehicle else {
            return Vec::new();
        };
        let window = ctx.mobility.window_index(ctx.now);
        let horizon = self.cfg.staleness_horizon();
        let mut out = Vec::new();
        for edge in v.remaining.iter().skip(1) {
            if self.view.fresh(edge, ctx.now, horizon).is_some() || self.outstanding.contains(edge) {
                continue;
            }
            let Ok(name) = make_traffic_name(edge, window) else {
                continue;
            };
            let interest = Interest::new(name, ctx.rng.random::<u32>()).with_lifetime(self.cfg.interest_lifetime_ms);
            self.outstanding.insert(edge.clone());
            self.queries += 1;
            out.push(AppAction::Express { interest, tracked: true });
        }
        out.extend(self.maybe_reroute(ctx));
        out
    }

    pub fn on_data(&mut self, ctx: &mut AppContext, interest: &Interest, data: &Data) -> Vec<AppAction> {
        if let Ok((road, _)) = parse_traffic_name(&interest.name) {
            self.outstanding.remove(&road);
        }
        match TrafficPayload::from_json(&data.payload) {
            Ok(p) => self.view.update(p, ctx.now),
            Err(_) => {
                self.malformed += 1;
                return Vec::new();
            }
        }
        self.maybe_reroute(ctx)
    }

    pub fn on_failure(&mut self, interest: &Interest) -> Vec<AppAction> {
        if let Ok((road, _)) = parse_traffic_name(&interest.name) {
            self.outstanding.remove(&road);
        }
        Vec::new()
    }

    pub fn maybe_reroute(&mut self, ctx: &mut AppContext) -> Vec<AppAction> {
        let (Some(v), Some(graph)) = (ctx.vehicle, ctx.mobility.graph()) else {
            return Vec::new();
        };
        match plan_reroute(graph, &v.remaining, &self.view, &self.cfg, ctx.now) {
            Some(route) => {
                self.reroutes += 1;
                vec![AppAction::SetRoute(route)]
            }
            None => Vec::new(),
        }
    }
}

fn edge_weight(graph: &RoadGraph, idx: usize, view: &TrafficView, cfg: &TmsConfig, now: SimTime) -> f64 {
    let e = graph.edge(idx);
    let speed = match view.fresh(&e.id, now, cfg.staleness_horizon()) {
        Some(p) => e.speed_limit.min(p.mean_speed.max(1.0)),
        None => e.speed_limit,
    };
    e.length / speed
}

/// Congestion-weighted travel time of a route.
pub fn route_cost(graph: &RoadGraph, route: &[String], view: &TrafficView, cfg: &TmsConfig, now: SimTime) -> f64 {
    route
        .iter()
        .filter_map(|id| graph.edge_idx(id))
        .map(|i| edge_weight(graph, i, view, cfg, now))
        .sum()
}

/// Decides whether to leave `remaining` (current edge first). Returns the
/// new route when an upcoming edge is congested and the best alternative is
/// faster by more than the improvement margin.
pub fn plan_reroute(
    graph: &RoadGraph,
    remaining: &[String],
    view: &TrafficView,
    cfg: &TmsConfig,
    now: SimTime,
) -> Option<Vec<String>> {
    if remaining.len() < 2 {
        return None;
    }
    let horizon = cfg.staleness_horizon();
    let congested = remaining.iter().skip(1).any(|id| {
        let (Some(idx), Some(p)) = (graph.edge_idx(id), view.fresh(id, now, horizon)) else {
            return false;
        };
        let limit = graph.edge(idx).speed_limit;
        p.mean_speed < cfg.congestion_speed_ratio * limit || p.occupancy > cfg.congestion_occupancy
    });
    if !congested {
        return None;
    }
    let weight = |e: &crate::mobility::Edge| {
        let idx = graph.edge_idx(&e.id).unwrap();
        edge_weight(graph, idx, view, cfg, now)
    };
    let (alt, alt_cost) = graph
        .shortest_path(&remaining[0], remaining.last().unwrap(), weight)
        .ok()?;
    let current = route_cost(graph, remaining, view, cfg, now);
    (alt_cost < (1.0 - cfg.improvement_margin) * current && alt.as_slice() != remaining).then_some(alt)
}
