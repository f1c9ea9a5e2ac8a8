use std::fmt;

use super::Name;

pub const DEFAULT_INTEREST_LIFETIME_MS: u32 = 2000;
/// Largest Data payload; matches the radio MTU.
pub const MAX_PAYLOAD_LEN: usize = 8192;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interest {
    pub name: Name,
    pub nonce: u32,
    pub lifetime_ms: u32,
    pub can_be_prefix: bool,
    /// Incremented on every wireless reception.
    pub hop_count: u32,
}

impl Interest {
    pub fn new(name: Name, nonce: u32) -> Self {
        Self {
            name,
            nonce,
            lifetime_ms: DEFAULT_INTEREST_LIFETIME_MS,
            can_be_prefix: false,
            hop_count: 0,
        }
    }

    pub fn with_lifetime(mut self, lifetime_ms: u32) -> Self {
        self.lifetime_ms = lifetime_ms;
        self
    }

    pub fn with_can_be_prefix(mut self, can_be_prefix: bool) -> Self {
        self.can_be_prefix = can_be_prefix;
        self
    }

    /// Whether `data` satisfies this interest.
    pub fn matches_data(&self, data: &Data) -> bool {
        if self.can_be_prefix {
            self.name.is_prefix_of(&data.name)
        } else {
            self.name == data.name
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Data {
    pub name: Name,
    pub payload: Vec<u8>,
    pub freshness_ms: u32,
}

impl Data {
    pub fn new(name: Name, payload: impl Into<Vec<u8>>, freshness_ms: u32) -> Self {
        Self {
            name,
            payload: payload.into(),
            freshness_ms,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NackReason {
    NoRoute,
    Duplicate,
    Congestion,
}

impl NackReason {
    pub fn code(self) -> u8 {
        match self {
            NackReason::NoRoute => 1,
            NackReason::Duplicate => 2,
            NackReason::Congestion => 3,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            1 => Some(NackReason::NoRoute),
            2 => Some(NackReason::Duplicate),
            3 => Some(NackReason::Congestion),
            _ => None,
        }
    }
}

/// Negative acknowledgement carrying the name and nonce of the refused
/// interest.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Nack {
    pub reason: NackReason,
    pub name: Name,
    pub nonce: u32,
}

impl Nack {
    pub fn for_interest(interest: &Interest, reason: NackReason) -> Self {
        Self {
            reason,
            name: interest.name.clone(),
            nonce: interest.nonce,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Packet {
    Interest(Interest),
    Data(Data),
    Nack(Nack),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PacketKind {
    Interest,
    Data,
    Nack,
}

impl fmt::Display for PacketKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PacketKind::Interest => "interest",
            PacketKind::Data => "data",
            PacketKind::Nack => "nack",
        })
    }
}

impl Packet {
    pub fn kind(&self) -> PacketKind {
        match self {
            Packet::Interest(_) => PacketKind::Interest,
            Packet::Data(_) => PacketKind::Data,
            Packet::Nack(_) => PacketKind::Nack,
        }
    }

    pub fn name(&self) -> &Name {
        match self {
            Packet::Interest(i) => &i.name,
            Packet::Data(d) => &d.name,
            Packet::Nack(n) => &n.name,
        }
    }

    pub fn nonce(&self) -> Option<u32> {
        match self {
            Packet::Interest(i) => Some(i.nonce),
            Packet::Data(_) => None,
            Packet::Nack(n) => Some(n.nonce),
        }
    }
}

impl From<Interest> for Packet {
    fn from(i: Interest) -> Self {
        Packet::Interest(i)
    }
}

impl From<Data> for Packet {
    fn from(d: Data) -> Self {
        Packet::Data(d)
    }
}

impl From<Nack> for Packet {
    fn from(n: Nack) -> Self {
        Packet::Nack(n)
    }
}
