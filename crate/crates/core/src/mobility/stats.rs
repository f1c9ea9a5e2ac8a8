use std::collections::BTreeMap;

use super::graph::Edge;
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrafficWindowStats {
    pub window: u64,
    pub mean_speed: f64,
    pub occupancy: f64,
    pub sample_count: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct WindowAcc {
    vehicle_s: f64,
    speed_s: f64,
    samples: u64,
}

/// Time-weighted per-edge, per-window speed and occupancy accumulators.
#[derive(Debug, Clone)]
pub struct EdgeStatsAcc {
    window: SimTime,
    slot_m: f64,
    acc: BTreeMap<(usize, u64), WindowAcc>,
}

impl EdgeStatsAcc {
    pub fn new(window: SimTime, slot_m: f64) -> Self {
        Self {
            window,
            slot_m,
            acc: BTreeMap::new(),
        }
    }

    pub fn window_index(&self, t: SimTime) -> u64 {
        t.as_micros() / self.window.as_micros()
    }

    /// One vehicle spent `[t0, t0 + dt)` on `edge` at `speed`.
    pub fn record(&mut self, edge: usize, t0: SimTime, dt: SimTime, speed: f64) {
        let dts = dt.as_secs_f64();
        let a = self.acc.entry((edge, self.window_index(t0))).or_default();
        a.vehicle_s += dts;
        a.speed_s += speed * dts;
        a.samples += 1;
    }

    /// Stats as of `now`. The in-progress window is normalised by the time
    /// elapsed in it so far; an empty window reports free flow.
    pub fn stats(&self, idx: usize, edge: &Edge, window: u64, now: SimTime) -> TrafficWindowStats {
        let w = self.window.as_micros();
        let elapsed_us = now.as_micros().saturating_sub(window * w).min(w);
        let acc = self.acc.get(&(idx, window)).copied().unwrap_or_default();
        if acc.samples == 0 || elapsed_us == 0 {
            return TrafficWindowStats {
                window,
                mean_speed: edge.speed_limit,
                occupancy: 0.0,
                sample_count: 0,
            };
        }
        let capacity = elapsed_us as f64 / 1e6 * edge.lanes as f64 * edge.length / self.slot_m;
        TrafficWindowStats {
            window,
            mean_speed: acc.speed_s / acc.vehicle_s,
            occupancy: (acc.vehicle_s / capacity).clamp(0.0, 1.0),
            sample_count: acc.samples,
        }
    }
}
