//! Application naming schemas: one-hop safety beacons and traffic-service
//! queries.
//!
//! ```text
//! /localhop/beacon/<node-id>/<kind>/<road-id>/<x>/<y>/<z>/<speed>
//! /service/traffic/<road-id>/<time-window>
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Name;

pub const LOCALHOP: &str = "localhop";
pub const BEACON: &str = "beacon";
pub const SERVICE: &str = "service";
pub const TRAFFIC: &str = "traffic";

const BEACON_ARITY: usize = 9;
const TRAFFIC_ARITY: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("not a beacon name")]
    NotABeacon,
    #[error("not a traffic name")]
    NotTraffic,
    #[error("bad numeric component {0:?}")]
    BadNumber(String),
    #[error("unknown vehicle kind {0:?}")]
    BadKind(String),
    #[error("empty road id")]
    EmptyRoad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum VehicleKind {
    #[default]
    Passenger,
    Emergency,
}

impl VehicleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VehicleKind::Passenger => "passenger",
            VehicleKind::Emergency => "emergency",
        }
    }
}

impl fmt::Display for VehicleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VehicleKind {
    type Err = SchemaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "passenger" => Ok(VehicleKind::Passenger),
            "emergency" => Ok(VehicleKind::Emergency),
            other => Err(SchemaError::BadKind(other.to_string())),
        }
    }
}

/// What a vehicle announces about itself in a beacon.
#[derive(Debug, Clone, PartialEq)]
pub struct BeaconInfo {
    pub node_id: String,
    pub vehicle_kind: VehicleKind,
    pub road_id: String,
    pub pos_x: f64,
    pub pos_y: f64,
    pub pos_z: f64,
    pub speed: f64,
}

/// Shortest decimal text of `v` rounded to two fractional digits.
pub fn format_decimal(v: f64) -> String {
    let mut s = format!("{:.2}", v);
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

fn parse_decimal(s: &str) -> Result<f64, SchemaError> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| SchemaError::BadNumber(s.to_string()))
}

pub fn make_beacon_name(info: &BeaconInfo) -> Name {
    let node_id = non_empty(&info.node_id, "_");
    let road_id = non_empty(&info.road_id, "_");
    Name::from_components([
        LOCALHOP.to_string(),
        BEACON.to_string(),
        node_id,
        info.vehicle_kind.as_str().to_string(),
        road_id,
        format_decimal(info.pos_x),
        format_decimal(info.pos_y),
        format_decimal(info.pos_z),
        format_decimal(info.speed),
    ])
    .expect("beacon components are non-empty and short")
}

fn non_empty(s: &str, fallback: &str) -> String {
    if s.is_empty() {
        fallback.to_string()
    } else {
        s.chars().take(255).collect()
    }
}

pub fn parse_beacon_name(name: &Name) -> Result<BeaconInfo, SchemaError> {
    if name.len() != BEACON_ARITY || !name.first_is(LOCALHOP) || name.component_str(1) != Some(BEACON) {
        return Err(SchemaError::NotABeacon);
    }
    let text = |i: usize| name.component_str(i).ok_or(SchemaError::NotABeacon);
    let speed = parse_decimal(text(8)?)?;
    if speed < 0.0 {
        return Err(SchemaError::BadNumber(text(8)?.to_string()));
    }
    Ok(BeaconInfo {
        node_id: text(2)?.to_string(),
        vehicle_kind: text(3)?.parse()?,
        road_id: text(4)?.to_string(),
        pos_x: parse_decimal(text(5)?)?,
        pos_y: parse_decimal(text(6)?)?,
        pos_z: parse_decimal(text(7)?)?,
        speed,
    })
}

pub fn is_beacon_name(name: &Name) -> bool {
    name.first_is(LOCALHOP) && name.component_str(1) == Some(BEACON)
}

pub fn make_traffic_name(road_id: &str, window: u64) -> Result<Name, SchemaError> {
    if road_id.is_empty() {
        return Err(SchemaError::EmptyRoad);
    }
    Name::from_components([SERVICE, TRAFFIC, road_id, &window.to_string()]).map_err(|_| SchemaError::EmptyRoad)
}

pub fn traffic_prefix() -> Name {
    Name::from_components([SERVICE, TRAFFIC]).unwrap()
}

pub fn parse_traffic_name(name: &Name) -> Result<(String, u64), SchemaError> {
    if name.len() != TRAFFIC_ARITY || !name.first_is(SERVICE) || name.component_str(1) != Some(TRAFFIC) {
        return Err(SchemaError::NotTraffic);
    }
    let road = name.component_str(2).ok_or(SchemaError::NotTraffic)?.to_string();
    let window_text = name.component_str(3).ok_or(SchemaError::NotTraffic)?;
    let window = window_text
        .parse::<u64>()
        .map_err(|_| SchemaError::BadNumber(window_text.to_string()))?;
    Ok((road, window))
}
