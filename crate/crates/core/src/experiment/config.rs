use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ConfigError;
use crate::apps::{BeaconConfig, TmsConfig};
use crate::forwarder::Strategy;
use crate::netsim::RadioConfig;

/// Road network source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    Grid {
        rows: u32,
        cols: u32,
        block_m: f64,
        #[serde(default = "default_urban_speed")]
        speed_limit: f64,
        #[serde(default = "default_one")]
        lanes: u32,
    },
    Highway {
        length_m: f64,
        #[serde(default = "default_highway_lanes")]
        lanes: u32,
        #[serde(default = "default_highway_speed")]
        speed_limit: f64,
    },
    /// Native JSON network file.
    File { path: PathBuf },
}

fn default_urban_speed() -> f64 {
    13.9
}

fn default_highway_speed() -> f64 {
    27.8
}

fn default_highway_lanes() -> u32 {
    3
}

fn default_one() -> u32 {
    1
}

/// Forwarding level of a run. `None` runs the same traffic without the
/// traffic-management application at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StrategyLevel {
    #[serde(rename = "multicast")]
    Multicast,
    #[serde(rename = "multicast-vanet", alias = "multicast_vanet")]
    MulticastVanet,
    #[serde(rename = "none")]
    None,
}

impl StrategyLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            StrategyLevel::Multicast => "multicast",
            StrategyLevel::MulticastVanet => "multicast-vanet",
            StrategyLevel::None => "none",
        }
    }

    /// Forwarder strategy; the baseline still needs one for beacons.
    pub fn forwarder(self) -> Strategy {
        match self {
            StrategyLevel::MulticastVanet => Strategy::MulticastVanet,
            _ => Strategy::Multicast,
        }
    }
}

impl fmt::Display for StrategyLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "multicast" => Ok(StrategyLevel::Multicast),
            "multicast-vanet" | "multicast_vanet" => Ok(StrategyLevel::MulticastVanet),
            "none" => Ok(StrategyLevel::None),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

/// A slowdown on one edge. Without `edge`, the incident is placed on the
/// first edge (by id) leaving the junction nearest the map center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IncidentSpec {
    pub edge: Option<String>,
    pub t_start_s: f64,
    pub t_end_s: f64,
    pub speed_factor: f64,
}

impl Default for IncidentSpec {
    fn default() -> Self {
        Self {
            edge: None,
            t_start_s: 120.0,
            t_end_s: 480.0,
            speed_factor: 0.1,
        }
    }
}

/// A vehicle that stays put for the whole run. It runs the vehicle app
/// stack and reports `route` as its remaining route.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParkedVehicle {
    pub id: String,
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub route: Vec<String>,
    #[serde(default)]
    pub lane: u32,
}

/// One simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub map: MapSpec,
    /// Replays vehicle movement from a SUMO FCD trace instead of the native
    /// model.
    #[serde(default)]
    pub fcd: Option<PathBuf>,
    pub duration_s: f64,
    /// Concurrent vehicles per km² of map bounding box.
    pub density: f64,
    /// Overrides the vehicle count derived from `density`.
    #[serde(default)]
    pub target_vehicles: Option<usize>,
    pub n_rsus: usize,
    /// RSU coordinates; evenly spaced on the map diagonal when absent.
    #[serde(default)]
    pub rsu_positions: Option<Vec<[f64; 2]>>,
    /// Edges every RSU serves; by default each RSU serves the edges within
    /// radio range.
    #[serde(default)]
    pub monitored_edges: Option<Vec<String>>,
    pub cache_size: usize,
    pub strategy: StrategyLevel,
    #[serde(default)]
    pub radio: RadioConfig,
    /// Beaconing is off unless configured.
    #[serde(default)]
    pub beacon: Option<BeaconConfig>,
    #[serde(default)]
    pub tms: TmsConfig,
    #[serde(default)]
    pub incidents: Vec<IncidentSpec>,
    #[serde(default)]
    pub parked: Vec<ParkedVehicle>,
    #[serde(default)]
    pub emergency_ratio: f64,
    #[serde(default = "default_jitter")]
    pub vanet_jitter_ms: f64,
    #[serde(default = "default_tick")]
    pub tick_ms: u64,
    pub seed: u64,
}

fn default_jitter() -> f64 {
    10.0
}

fn default_tick() -> u64 {
    100
}

fn err(field: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        msg: msg.into(),
    }
}

/// Sub-config messages start with the offending field name.
fn nested(section: &str, msg: &str) -> ConfigError {
    match msg.split_once(' ') {
        Some((field, rest)) => err(&format!("{section}.{field}"), rest),
        None => err(section, msg),
    }
}

impl ScenarioConfig {
    /// Parses JSON; errors name the offending field path.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Parse {
            field: e.path().to_string(),
            msg: e.inner().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads a scenario file. Relative map and trace paths are resolved
    /// against the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;
        let mut cfg = Self::from_json(&text)?;
        if let Some(dir) = path.parent() {
            cfg.resolve_paths(dir);
        }
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, dir: &Path) {
        if let MapSpec::File { path } = &mut self.map {
            if path.is_relative() {
                *path = dir.join(&*path);
            }
        }
        if let Some(p) = &mut self.fcd {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match &self.map {
            MapSpec::Grid {
                rows,
                cols,
                block_m,
                speed_limit,
                lanes,
            } => {
                if *rows < 2 || *cols < 2 {
                    return Err(err("map.rows", "grid needs at least 2 rows and 2 cols"));
                }
                if !(*block_m > 0.0) {
                    return Err(err("map.block_m", "must be > 0"));
                }
                if !(*speed_limit > 0.0) {
                    return Err(err("map.speed_limit", "must be > 0"));
                }
                if *lanes == 0 {
                    return Err(err("map.lanes", "must be >= 1"));
                }
            }
            MapSpec::Highway {
                length_m,
                lanes,
                speed_limit,
            } => {
                if !(*length_m > 0.0) {
                    return Err(err("map.length_m", "must be > 0"));
                }
                if *lanes == 0 {
                    return Err(err("map.lanes", "must be >= 1"));
                }
                if !(*speed_limit > 0.0) {
                    return Err(err("map.speed_limit", "must be > 0"));
                }
            }
            MapSpec::File { .. } => {}
        }
        if !(self.duration_s > 0.0 && self.duration_s.is_finite()) {
            return Err(err("duration_s", "must be > 0"));
        }
        if !(self.density >= 0.0 && self.density.is_finite()) {
            return Err(err("density", "must be >= 0"));
        }
        if let Some(p) = &self.rsu_positions {
            if p.len() != self.n_rsus {
                return Err(err(
                    "rsu_positions",
                    format!("{} positions given for {} RSUs", p.len(), self.n_rsus),
                ));
            }
        }
        self.radio.validate().map_err(|m| nested("radio", &m))?;
        self.tms.validate().map_err(|m| nested("tms", &m))?;
        for (i, inc) in self.incidents.iter().enumerate() {
            if !(inc.t_start_s >= 0.0 && inc.t_start_s < inc.t_end_s) {
                return Err(err(&format!("incidents[{i}].t_start_s"), "must satisfy 0 <= t_start_s < t_end_s"));
            }
            if !(inc.speed_factor > 0.0 && inc.speed_factor <= 1.0) {
                return Err(err(&format!("incidents[{i}].speed_factor"), "must be in (0, 1]"));
            }
        }
        if !(0.0..=1.0).contains(&self.emergency_ratio) {
            return Err(err("emergency_ratio", "must be in [0, 1]"));
        }
        if !(self.vanet_jitter_ms >= 0.0 && self.vanet_jitter_ms.is_finite()) {
            return Err(err("vanet_jitter_ms", "must be >= 0"));
        }
        if self.tick_ms == 0 {
            return Err(err("tick_ms", "must be > 0"));
        }
        let mut ids = std::collections::BTreeSet::new();
        for (i, p) in self.parked.iter().enumerate() {
            if p.id.is_empty() || p.id.contains('/') {
                return Err(err(&format!("parked[{i}].id"), "must be non-empty and contain no '/'"));
            }
            if !ids.insert(&p.id) {
                return Err(err(&format!("parked[{i}].id"), format!("duplicate id {:?}", p.id)));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MIN: &str = r#"{
        "map": {"type": "grid", "rows": 3, "cols": 3, "block_m": 100},
        "duration_s": 60, "density": 1000, "n_rsus": 1, "cache_size": 1000,
        "strategy": "multicast-vanet", "seed": 1
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = ScenarioConfig::from_json(MIN).unwrap();
        assert_eq!(c.strategy, StrategyLevel::MulticastVanet);
        assert_eq!(c.radio, RadioConfig::default());
        assert!(c.beacon.is_none());
        assert_eq!(c.tick_ms, 100);
        let back = ScenarioConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn errors_carry_field_paths() {
        let bad = MIN.replace("\"seed\": 1", "\"seed\": 1, \"radio\": {\"range_m\": \"far\"}");
        match ScenarioConfig::from_json(&bad) {
            Err(ConfigError::Parse { field, .. }) => assert_eq!(field, "radio.range_m"),
            other => panic!("{other:?}"),
        }
        let bad = MIN.replace("\"n_rsus\": 1", "\"n_rsus\": 1, \"rsu_positions\": []");
        match ScenarioConfig::from_json(&bad) {
            Err(ConfigError::Invalid { field, .. }) => assert_eq!(field, "rsu_positions"),
            other => panic!("{other:?}"),
        }
        let bad = MIN.replace("\"seed\": 1", "\"seed\": 1, \"incidents\": [{\"speed_factor\": 0}]");
        match ScenarioConfig::from_json(&bad) {
            Err(ConfigError::Invalid { field, .. }) => assert_eq!(field, "incidents[0].speed_factor"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nested_validation_paths() {
        let bad = MIN.replace("\"seed\": 1", "\"seed\": 1, \"radio\": {\"range_m\": -1}");
        match ScenarioConfig::from_json(&bad) {
            Err(ConfigError::Invalid { field, .. }) => assert_eq!(field, "radio.range_m"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn seed_is_required() {
        let bad = MIN.replace(", \"seed\": 1", "");
        assert!(matches!(ScenarioConfig::from_json(&bad), Err(ConfigError::Parse { .. })));
    }

    #[test]
    fn strategy_names() {
        for s in ["multicast", "multicast-vanet", "none"] {
            assert_eq!(s.parse::<StrategyLevel>().unwrap().as_str(), s);
        }
        assert_eq!("multicast_vanet".parse::<StrategyLevel>().unwrap(), StrategyLevel::MulticastVanet);
    }
}
