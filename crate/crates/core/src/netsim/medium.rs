use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::time::SimTime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MediumError {
    #[error("frame of {len} bytes exceeds the {mtu}-byte MTU")]
    FrameTooBig { len: usize, mtu: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CollisionMode {
    #[default]
    None,
    /// Frames overlapping in airtime at a receiver are all lost there.
    Slot,
}

/// Radio parameters, the `radio` section of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioConfig {
    pub range_m: f64,
    pub data_rate_bps: f64,
    pub overhead_ms: f64,
    pub loss_probability: f64,
    pub mtu: usize,
    pub collisions: CollisionMode,
    /// Random channel-access delay added to every wireless send, drawn
    /// uniformly from `[0, mac_backoff_ms]`.
    pub mac_backoff_ms: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self {
            range_m: 70.0,
            data_rate_bps: 6_000_000.0,
            overhead_ms: 0.1,
            loss_probability: 0.0,
            mtu: 8192,
            collisions: CollisionMode::None,
            mac_backoff_ms: 2.0,
        }
    }
}

impl RadioConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.range_m > 0.0) {
            return Err("range_m must be > 0".into());
        }
        if !(self.data_rate_bps > 0.0) {
            return Err("data_rate_bps must be > 0".into());
        }
        if !(self.overhead_ms >= 0.0) {
            return Err("overhead_ms must be >= 0".into());
        }
        if !(0.0..=1.0).contains(&self.loss_probability) {
            return Err("loss_probability must be in [0, 1]".into());
        }
        if self.mtu == 0 {
            return Err("mtu must be > 0".into());
        }
        if !(self.mac_backoff_ms >= 0.0) {
            return Err("mac_backoff_ms must be >= 0".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const PARKED: Position = Position { x: -1e6, y: -1e6 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, o: &Position) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }
}

/// A node as seen by the medium when a frame starts.
#[derive(Debug, Clone, Copy)]
pub struct Station {
    pub id: u32,
    pub position: Position,
    pub active: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Delivery {
    pub to: u32,
    pub at: SimTime,
    /// Lost to `loss_probability`; the receiver never sees it.
    pub lost: bool,
}

/// Unit-disk broadcast medium.
#[derive(Debug, Clone)]
pub struct Medium {
    config: RadioConfig,
    /// Per receiver: (start, end, frame id) of frames heard, for slot collisions.
    heard: BTreeMap<u32, Vec<(SimTime, SimTime, u64)>>,
}

impl Medium {
    pub fn new(config: RadioConfig) -> Self {
        Self {
            config,
            heard: BTreeMap::new(),
        }
    }

    pub fn config(&self) -> &RadioConfig {
        &self.config
    }

    pub fn airtime(&self, bytes: usize) -> SimTime {
        let ms = bytes as f64 * 8.0 / self.config.data_rate_bps * 1000.0 + self.config.overhead_ms;
        SimTime::from_millis_f64(ms)
    }

    pub fn in_range(&self, a: &Position, b: &Position) -> bool {
        a.distance(b) <= self.config.range_m
    }

    /// Decides receivers of a frame sent by `sender` at `now`. Receivers
    /// come back in ascending id order. Loss draws only happen when the
    /// loss probability is non-zero.
    pub fn broadcast<R: Rng + ?Sized>(
        &mut self,
        sender: &Station,
        len: usize,
        now: SimTime,
        frame_id: u64,
        stations: &[Station],
        rng: &mut R,
    ) -> Result<Vec<Delivery>, MediumError> {
        if len > self.config.mtu {
            return Err(MediumError::FrameTooBig {
                len,
                mtu: self.config.mtu,
            });
        }
        if !sender.active {
            return Ok(Vec::new());
        }
        let at = now + self.airtime(len);
        let mut ids: Vec<&Station> = stations
            .iter()
            .filter(|s| s.id != sender.id && s.active && self.in_range(&sender.position, &s.position))
            .collect();
        ids.sort_by_key(|s| s.id);
        let mut out = Vec::with_capacity(ids.len());
        for s in ids {
            let lost = self.config.loss_probability > 0.0 && rng.random::<f64>() < self.config.loss_probability;
            if self.config.collisions == CollisionMode::Slot {
                self.heard.entry(s.id).or_default().push((now, at, frame_id));
            }
            out.push(Delivery { to: s.id, at, lost });
        }
        Ok(out)
    }

    /// Under slot collisions, whether `frame_id` overlapped another frame at
    /// `receiver`. Call once at delivery time; old records are pruned.
    pub fn collided(&mut self, receiver: u32, frame_id: u64, now: SimTime) -> bool {
        if self.config.collisions == CollisionMode::None {
            return false;
        }
        let max_air = self.airtime(self.config.mtu);
        let Some(list) = self.heard.get_mut(&receiver) else {
            return false;
        };
        let Some(&(start, end, _)) = list.iter().find(|r| r.2 == frame_id) else {
            return false;
        };
        let hit = list
            .iter()
            .any(|&(s, e, id)| id != frame_id && s < end && start < e);
        // keep records that may still overlap a frame delivered later
        let horizon = now.saturating_sub(max_air);
        list.retain(|&(_, e, _)| e > horizon);
        hit
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn st(id: u32, x: f64) -> Station {
        Station {
            id,
            position: Position::new(x, 0.0),
            active: true,
        }
    }

    #[test]
    fn airtime_of_200_bytes() {
        let m = Medium::new(RadioConfig::default());
        // 200*8/6e6 s = 0.26667 ms, plus 0.1 ms, rounded up to whole microseconds
        assert_eq!(m.airtime(200), SimTime::from_micros(367));
    }

    #[test]
    fn range_boundary() {
        let mut m = Medium::new(RadioConfig::default());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let stations = [st(0, 0.0), st(1, 69.9), st(2, 70.1), st(3, -70.0)];
        let d = m.broadcast(&stations[0], 100, SimTime::ZERO, 0, &stations, &mut rng).unwrap();
        let ids: Vec<u32> = d.iter().map(|d| d.to).collect();
        assert_eq!(ids, vec![1, 3]);
    }

    #[test]
    fn inactive_receiver_and_mtu() {
        let mut m = Medium::new(RadioConfig::default());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut stations = [st(0, 0.0), st(1, 10.0)];
        stations[1].active = false;
        assert!(m.broadcast(&stations[0], 10, SimTime::ZERO, 0, &stations, &mut rng).unwrap().is_empty());
        assert_eq!(
            m.broadcast(&stations[0], 9000, SimTime::ZERO, 1, &stations, &mut rng),
            Err(MediumError::FrameTooBig { len: 9000, mtu: 8192 })
        );
    }

    #[test]
    fn slot_collisions() {
        let cfg = RadioConfig {
            collisions: CollisionMode::Slot,
            ..RadioConfig::default()
        };
        let mut m = Medium::new(cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let stations = [st(0, 0.0), st(1, 30.0), st(2, 60.0)];
        m.broadcast(&stations[0], 100, SimTime::ZERO, 1, &stations, &mut rng).unwrap();
        m.broadcast(&stations[2], 100, SimTime::from_micros(50), 2, &stations, &mut rng).unwrap();
        let t = m.airtime(100);
        assert!(m.collided(1, 1, t));
        assert!(m.collided(1, 2, t + SimTime::from_micros(50)));
        // far apart in time: no collision
        m.broadcast(&stations[0], 100, SimTime::from_millis(10), 3, &stations, &mut rng).unwrap();
        assert!(!m.collided(1, 3, SimTime::from_millis(10) + t));
    }
}
