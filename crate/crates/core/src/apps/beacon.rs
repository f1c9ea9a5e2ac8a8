use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{AppAction, AppContext};
use crate::ndn::schema::{make_beacon_name, parse_beacon_name, BeaconInfo, VehicleKind};
use crate::ndn::Interest;
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeaconConfig {
    pub interval_ms: u64,
    /// Listen-only nodes keep a neighbour table but never beacon.
    pub send: bool,
}

impl Default for BeaconConfig {
    fn default() -> Self {
        Self {
            interval_ms: 1000,
            send: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborEntry {
    pub info: BeaconInfo,
    pub last_seen: SimTime,
}

#[derive(Debug, Clone, Default)]
pub struct NeighborTable {
    ttl: SimTime,
    entries: BTreeMap<String, NeighborEntry>,
}

impl NeighborTable {
    pub fn new(ttl: SimTime) -> Self {
        Self {
            ttl,
            entries: BTreeMap::new(),
        }
    }

    pub fn upsert(&mut self, info: BeaconInfo, now: SimTime) {
        self.purge(now);
        self.entries.insert(info.node_id.clone(), NeighborEntry { info, last_seen: now });
    }

    /// Drops entries not refreshed within the ttl.
    pub fn purge(&mut self, now: SimTime) {
        let ttl = self.ttl;
        self.entries.retain(|_, e| now.saturating_sub(e.last_seen) <= ttl);
    }

    pub fn get(&self, id: &str) -> Option<&NeighborEntry> {
        self.entries.get(id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &NeighborEntry> {
        self.entries.values()
    }
}

/// One-hop safety beacons with the emergency-yield rule.
#[derive(Debug, Clone)]
pub struct BeaconApp {
    cfg: BeaconConfig,
    pub neighbors: NeighborTable,
    pub sent: u64,
    /// Beacons heard, per sender id.
    pub received: BTreeMap<String, u64>,
    pub malformed: u64,
    pub lane_changes: u64,
}

impl BeaconApp {
    pub fn new(cfg: BeaconConfig) -> Self {
        Self {
            cfg,
            neighbors: NeighborTable::new(SimTime::from_millis(3 * cfg.interval_ms)),
            sent: 0,
            received: BTreeMap::new(),
            malformed: 0,
            lane_changes: 0,
        }
    }

    /// A beacon describes the sender at one instant, so its PIT entries age
    /// out before the next beacon can be aggregated into them.
    fn lifetime_ms(&self) -> u32 {
        (self.cfg.interval_ms / 2).clamp(1, u64::from(u32::MAX)) as u32
    }

    fn interval(&self) -> SimTime {
        SimTime::from_millis(self.cfg.interval_ms)
    }

    pub fn start(&mut self, ctx: &mut AppContext) -> Vec<AppAction> {
        if !self.cfg.send || self.cfg.interval_ms == 0 {
            return Vec::new();
        }
        let jitter = ctx.rng.random_range(0..self.interval().as_micros());
        vec![AppAction::Timer {
            delay: SimTime::from_micros(jitter),
            tag: 0,
        }]
    }

    pub fn on_timer(&mut self, ctx: &mut AppContext) -> Vec<AppAction> {
        let mut out = Vec::new();
        if let Some(v) = ctx.vehicle {
            let info = BeaconInfo {
                node_id: ctx.label.to_string(),
                vehicle_kind: v.kind,
                road_id: v.edge.clone(),
                pos_x: v.position.x,
                pos_y: v.position.y,
                pos_z: 0.0,
                speed: v.speed.max(0.0),
            };
            let nonce = ctx.rng.random::<u32>();
            out.push(AppAction::Express {
                interest: Interest::new(make_beacon_name(&info), nonce).with_lifetime(self.lifetime_ms()),
                tracked: false,
            });
            self.sent += 1;
        }
        out.push(AppAction::Timer {
            delay: self.interval(),
            tag: 0,
        });
        out
    }

    pub fn on_beacon(&mut self, ctx: &mut AppContext, interest: &Interest) -> Vec<AppAction> {
        let info = match parse_beacon_name(&interest.name) {
            Ok(info) => info,
            Err(_) => {
                self.malformed += 1;
                return Vec::new();
            }
        };
        *self.received.entry(info.node_id.clone()).or_default() += 1;
        let mut out = Vec::new();
        if let Some(me) = ctx.vehicle {
            let yield_needed = info.vehicle_kind == VehicleKind::Emergency
                && me.kind == VehicleKind::Passenger
                && info.road_id == me.edge
                && me.lane > 0;
            if yield_needed {
                out.push(AppAction::SetLane(me.lane - 1));
                self.lane_changes += 1;
            }
        }
        self.neighbors.upsert(info, ctx.now);
        out
    }
}
