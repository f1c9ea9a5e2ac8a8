use std::fmt;
use std::str::FromStr;

use crate::ndn::{Name, PacketKind};
use crate::tables::FaceKind;
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    In,
    Out,
}

/// What happened to a packet at a face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Forwarded,
    Aggregated,
    CsHit,
    Duplicate,
    Scope,
    NoRoute,
    Satisfied,
    Unsolicited,
    NackAbsorbed,
    NackConsumed,
    NackDropped,
    Sent,
    Delivered,
    Collision,
    Lost,
    Malformed,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Forwarded => "forwarded",
            Verdict::Aggregated => "aggregated",
            Verdict::CsHit => "cs_hit",
            Verdict::Duplicate => "duplicate",
            Verdict::Scope => "scope",
            Verdict::NoRoute => "no_route",
            Verdict::Satisfied => "satisfied",
            Verdict::Unsolicited => "unsolicited",
            Verdict::NackAbsorbed => "nack_absorbed",
            Verdict::NackConsumed => "nack_consumed",
            Verdict::NackDropped => "nack_dropped",
            Verdict::Sent => "sent",
            Verdict::Delivered => "delivered",
            Verdict::Collision => "collision",
            Verdict::Lost => "lost",
            Verdict::Malformed => "malformed",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One line of the packet trace:
/// `time_ms node_id face_kind dir pkt_type name nonce verdict`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub time: SimTime,
    pub node: u32,
    pub face_kind: FaceKind,
    pub dir: Direction,
    pub kind: PacketKind,
    pub name: Name,
    pub nonce: Option<u32>,
    pub verdict: Verdict,
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = match self.dir {
            Direction::In => "in",
            Direction::Out => "out",
        };
        write!(
            f,
            "{} {} {} {} {} {} ",
            self.time, self.node, self.face_kind, dir, self.kind, self.name
        )?;
        match self.nonce {
            Some(n) => write!(f, "{n}")?,
            None => f.write_str("-")?,
        }
        write!(f, " {}", self.verdict)
    }
}

/// Parsed form of a trace line, used by trace-level checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceLine {
    pub time_ms: String,
    pub node: u32,
    pub face_kind: String,
    pub dir: String,
    pub kind: String,
    pub name: Name,
    pub nonce: Option<u32>,
    pub verdict: String,
}

impl FromStr for TraceLine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let f: Vec<&str> = s.split(' ').collect();
        if f.len() != 8 {
            return Err(format!("expected 8 fields, got {}", f.len()));
        }
        Ok(TraceLine {
            time_ms: f[0].to_string(),
            node: f[1].parse().map_err(|e| format!("node: {e}"))?,
            face_kind: f[2].to_string(),
            dir: f[3].to_string(),
            kind: f[4].to_string(),
            name: Name::parse_uri(f[5]).map_err(|e| format!("name: {e}"))?,
            nonce: match f[6] {
                "-" => None,
                n => Some(n.parse().map_err(|e| format!("nonce: {e}"))?),
            },
            verdict: f[7].to_string(),
        })
    }
}
