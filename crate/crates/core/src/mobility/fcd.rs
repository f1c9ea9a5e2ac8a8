use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::graph::RoadGraph;
use super::stats::{EdgeStatsAcc, TrafficWindowStats};
use super::world::TripRecord;
use super::MobilityError;
use crate::ndn::schema::VehicleKind;
use crate::netsim::Position;
use crate::time::SimTime;

#[derive(Debug, Clone, PartialEq)]
pub struct FcdSample {
    pub x: f64,
    pub y: f64,
    pub speed: f64,
    pub lane: String,
    pub kind: VehicleKind,
}

/// A parsed floating-car-data trace: timesteps in ascending time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FcdTrace {
    pub steps: Vec<(SimTime, BTreeMap<String, FcdSample>)>,
}

fn parse_err(doc: &roxmltree::Document, node: roxmltree::Node, msg: String) -> MobilityError {
    MobilityError::Parse {
        line: doc.text_pos_at(node.range().start).row,
        msg,
    }
}

fn num_attr(doc: &roxmltree::Document, node: roxmltree::Node, name: &str) -> Result<f64, MobilityError> {
    let raw = node
        .attribute(name)
        .ok_or_else(|| parse_err(doc, node, format!("<{}> lacks attribute {name:?}", node.tag_name().name())))?;
    raw.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| parse_err(doc, node, format!("attribute {name}={raw:?} is not a number")))
}

impl FcdTrace {
    /// Parses the `<fcd-export><timestep time=..><vehicle .../>` dialect.
    /// Unknown attributes and elements are ignored.
    pub fn parse(text: &str) -> Result<Self, MobilityError> {
        let doc = roxmltree::Document::parse(text).map_err(|e| MobilityError::Parse {
            line: e.pos().row,
            msg: e.to_string(),
        })?;
        let root = doc.root_element();
        if root.tag_name().name() != "fcd-export" {
            return Err(parse_err(&doc, root, format!("expected <fcd-export>, found <{}>", root.tag_name().name())));
        }
        let mut steps: Vec<(SimTime, BTreeMap<String, FcdSample>)> = Vec::new();
        for ts in root.children().filter(|n| n.is_element() && n.has_tag_name("timestep")) {
            let t = num_attr(&doc, ts, "time")?;
            if t < 0.0 {
                return Err(parse_err(&doc, ts, "negative timestep time".into()));
            }
            let time = SimTime::from_micros((t * 1e6).round() as u64);
            if steps.last().is_some_and(|(prev, _)| *prev >= time) {
                return Err(parse_err(&doc, ts, "timesteps must be strictly increasing".into()));
            }
            let mut vehicles = BTreeMap::new();
            for v in ts.children().filter(|n| n.is_element() && n.has_tag_name("vehicle")) {
                let id = v
                    .attribute("id")
                    .ok_or_else(|| parse_err(&doc, v, "<vehicle> lacks attribute \"id\"".into()))?;
                let kind = match v.attribute("type") {
                    Some(t) if t.eq_ignore_ascii_case("emergency") => VehicleKind::Emergency,
                    _ => VehicleKind::Passenger,
                };
                let sample = FcdSample {
                    x: num_attr(&doc, v, "x")?,
                    y: num_attr(&doc, v, "y")?,
                    speed: num_attr(&doc, v, "speed")?.max(0.0),
                    lane: v.attribute("lane").unwrap_or("").to_string(),
                    kind,
                };
                if vehicles.insert(id.to_string(), sample).is_some() {
                    return Err(parse_err(&doc, v, format!("vehicle {id:?} appears twice in one timestep")));
                }
            }
            steps.push((time, vehicles));
        }
        Ok(Self { steps })
    }

    pub fn load(path: &std::path::Path) -> Result<Self, MobilityError> {
        let text = std::fs::read_to_string(path).map_err(|e| MobilityError::Parse { line: 0, msg: e.to_string() })?;
        Self::parse(&text)
    }
}

/// Splits a lane id of the form `<edge>_<index>`.
pub fn split_lane(lane: &str) -> (&str, u32) {
    match lane.rsplit_once('_') {
        Some((edge, idx)) => match idx.parse() {
            Ok(i) => (edge, i),
            Err(_) => (lane, 0),
        },
        None => (lane, 0),
    }
}

/// Mobility driven by a recorded trace. Vehicles appear at their first
/// timestep and disappear at the first timestep that omits them.
#[derive(Debug, Clone)]
pub struct Replay {
    trace: FcdTrace,
    graph: Option<Arc<RoadGraph>>,
    tick: SimTime,
    now: SimTime,
    /// Index of the latest timestep at or before `now`.
    cursor: Option<usize>,
    active: BTreeMap<String, SimTime>,
    spawned: u64,
    trips: Vec<TripRecord>,
    stats: EdgeStatsAcc,
}

impl Replay {
    pub fn new(trace: FcdTrace, graph: Option<Arc<RoadGraph>>, tick: SimTime, window: SimTime, slot_m: f64) -> Self {
        Self {
            trace,
            graph,
            tick,
            now: SimTime::ZERO,
            cursor: None,
            active: BTreeMap::new(),
            spawned: 0,
            trips: Vec::new(),
            stats: EdgeStatsAcc::new(window, slot_m),
        }
    }

    pub fn graph(&self) -> Option<&Arc<RoadGraph>> {
        self.graph.as_ref()
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn active_count(&self) -> usize {
        self.active.len()
    }

    pub fn active_ids(&self) -> impl Iterator<Item = &String> {
        self.active.keys()
    }

    pub fn spawned_total(&self) -> u64 {
        self.spawned
    }

    pub fn trips(&self) -> &[TripRecord] {
        &self.trips
    }

    fn sample(&self, id: &str) -> Option<&FcdSample> {
        self.trace.steps[self.cursor?].1.get(id)
    }

    /// Position linearly interpolated between the surrounding timesteps.
    pub fn position(&self, id: &str) -> Option<Position> {
        if !self.active.contains_key(id) {
            return None;
        }
        let k = self.cursor?;
        let (t0, ref now_step) = self.trace.steps[k];
        let a = now_step.get(id)?;
        if let Some((t1, next)) = self.trace.steps.get(k + 1) {
            if let Some(b) = next.get(id) {
                let f = (self.now - t0).as_secs_f64() / (*t1 - t0).as_secs_f64();
                return Some(Position::new(a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f));
            }
        }
        Some(Position::new(a.x, a.y))
    }

    pub fn speed(&self, id: &str) -> Option<f64> {
        self.sample(id).map(|s| s.speed)
    }

    pub fn kind(&self, id: &str) -> Option<VehicleKind> {
        self.sample(id).map(|s| s.kind)
    }

    /// Edge id and lane index from the sample's lane attribute.
    pub fn lane(&self, id: &str) -> Option<(String, u32)> {
        let s = self.sample(id)?;
        let (edge, lane) = split_lane(&s.lane);
        Some((edge.to_string(), lane))
    }

    fn edge_idx(&self, id: &str) -> Option<usize> {
        let (edge, _) = self.lane(id)?;
        self.graph.as_ref()?.edge_idx(&edge)
    }

    fn sync(&mut self) -> (Vec<String>, Vec<String>) {
        while self
            .trace
            .steps
            .get(self.cursor.map_or(0, |c| c + 1))
            .is_some_and(|(t, _)| *t <= self.now)
        {
            self.cursor = Some(self.cursor.map_or(0, |c| c + 1));
        }
        let present: BTreeSet<String> = match self.cursor {
            Some(k) => self.trace.steps[k].1.keys().cloned().collect(),
            None => BTreeSet::new(),
        };
        let arrived: Vec<String> = self.active.keys().filter(|id| !present.contains(*id)).cloned().collect();
        for id in &arrived {
            let depart = self.active.remove(id).unwrap();
            self.trips.push(TripRecord {
                depart,
                arrive: self.now,
                rerouted: false,
            });
        }
        let spawned: Vec<String> = present.into_iter().filter(|id| !self.active.contains_key(id)).collect();
        for id in &spawned {
            self.active.insert(id.clone(), self.now);
            self.spawned += 1;
        }
        (spawned, arrived)
    }

    pub fn spawn_initial(&mut self) -> super::StepEvents {
        let (spawned, arrived) = self.sync();
        super::StepEvents { spawned, arrived }
    }

    pub fn step(&mut self) -> super::StepEvents {
        let t0 = self.now;
        let records: Vec<(usize, f64)> = self
            .active
            .keys()
            .filter_map(|id| Some((self.edge_idx(id)?, self.speed(id)?)))
            .collect();
        for (edge, speed) in records {
            self.stats.record(edge, t0, self.tick, speed);
        }
        self.now = t0 + self.tick;
        let (spawned, arrived) = self.sync();
        super::StepEvents { spawned, arrived }
    }

    pub fn edge_stats(&self, edge: &str, window: u64) -> Result<TrafficWindowStats, MobilityError> {
        let g = self.graph.as_ref().ok_or_else(|| MobilityError::UnknownEdge(edge.to_string()))?;
        let idx = g.edge_idx(edge).ok_or_else(|| MobilityError::UnknownEdge(edge.to_string()))?;
        Ok(self.stats.stats(idx, g.edge(idx), window, self.now))
    }

    pub fn window_index(&self, t: SimTime) -> u64 {
        self.stats.window_index(t)
    }
}
