use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::node::{Effects, ForwarderNode};
use super::trace::{Direction, Verdict};
use crate::ndn::{schema::LOCALHOP, Interest, Nack, NackReason, Name, Packet};
use crate::tables::{FaceId, FaceKind};
use crate::time::SimTime;

/// Forwarding strategy, fixed for a whole run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Forward to every FIB next hop; answer `NoRoute` when there is none.
    Multicast,
    /// Always rebroadcast on the ad-hoc face after a random delay, never
    /// emit a Nack, absorb received Nacks.
    MulticastVanet,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Multicast => "multicast",
            Strategy::MulticastVanet => "multicast-vanet",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "multicast" => Ok(Strategy::Multicast),
            "multicast-vanet" | "multicast_vanet" => Ok(Strategy::MulticastVanet),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

/// A localhop interest that arrived over the air must not go back on the
/// air.
pub fn violates_scope(name: &Name, in_kind: FaceKind, out_kind: FaceKind) -> bool {
    name.first_is(LOCALHOP) && in_kind == FaceKind::WirelessAdhoc && out_kind == FaceKind::WirelessAdhoc
}

impl ForwarderNode {
    fn candidate_faces(&self, in_face: FaceId, interest: &Interest) -> Vec<FaceId> {
        let in_kind = self.face_kind(in_face).unwrap_or(FaceKind::WirelessAdhoc);
        self.fib
            .lpm(&interest.name)
            .map(|e| {
                e.next_hops
                    .iter()
                    .copied()
                    .filter(|&f| f != in_face)
                    .filter(|&f| {
                        let out = self.face_kind(f).unwrap_or(FaceKind::WirelessAdhoc);
                        !violates_scope(&interest.name, in_kind, out)
                    })
                    .collect()
            })
            .unwrap_or_default()
    }

    fn forward_to<R: Rng + ?Sized>(
        &mut self,
        faces: &[FaceId],
        interest: &Interest,
        now: SimTime,
        rng: &mut R,
        fx: &mut Effects,
    ) {
        for &face in faces {
            self.pit.add_out_record(&interest.name, face, interest.nonce, now);
            self.send(face, Packet::Interest(interest.clone()), now, rng, fx);
        }
    }

    pub(super) fn dispatch_multicast<R: Rng + ?Sized>(
        &mut self,
        in_face: FaceId,
        interest: Interest,
        now: SimTime,
        rng: &mut R,
        fx: &mut Effects,
    ) {
        let packet = Packet::Interest(interest.clone());
        let targets = self.candidate_faces(in_face, &interest);
        if targets.is_empty() {
            self.record(fx, now, in_face, Direction::In, &packet, Verdict::NoRoute);
            self.pit.remove(&interest.name);
            self.bump_pit_nacked();
            let nack = Nack::for_interest(&interest, NackReason::NoRoute);
            self.send(in_face, Packet::Nack(nack), now, rng, fx);
            return;
        }
        self.record(fx, now, in_face, Direction::In, &packet, Verdict::Forwarded);
        self.forward_to(&targets, &interest, now, rng, fx);
    }

    pub(super) fn dispatch_multicast_vanet<R: Rng + ?Sized>(
        &mut self,
        in_face: FaceId,
        interest: Interest,
        now: SimTime,
        rng: &mut R,
        fx: &mut Effects,
    ) {
        let packet = Packet::Interest(interest.clone());
        let mut targets = self.candidate_faces(in_face, &interest);
        if !interest.name.first_is(LOCALHOP) && !targets.contains(&FaceId::WIRELESS) {
            targets.push(FaceId::WIRELESS);
            targets.sort();
        }
        // nothing to do for a localhop interest without a local consumer; the
        // entry just ages out
        self.record(fx, now, in_face, Direction::In, &packet, Verdict::Forwarded);
        self.forward_to(&targets, &interest, now, rng, fx);
    }
}
