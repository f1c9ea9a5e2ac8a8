use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;
use thiserror::Error;

use super::strategy::{violates_scope, Strategy};
use super::trace::{Direction, TraceRecord, Verdict};
use crate::ndn::{Data, Interest, Nack, Name, Packet};
use crate::tables::{ContentStore, Face, FaceId, FaceKind, Fib, Pit, PitInsert};
use crate::time::SimTime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForwarderError {
    #[error("prefix {0} already registered on this node")]
    DuplicatePrefix(Name),
    #[error("face {0} is not an app face of this node")]
    NotAnAppFace(FaceId),
}

/// Packet counters. Sent/received counters cover the wireless face only, so
/// they measure what goes on the air.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub interests_sent: u64,
    pub data_sent: u64,
    pub nacks_sent: u64,
    pub interests_received: u64,
    pub data_received: u64,
    pub nacks_received: u64,
    pub cs_hits: u64,
    pub drops_unsolicited: u64,
    pub drops_scope: u64,
    pub drops_duplicate: u64,
    pub nacks_absorbed: u64,
    /// Queued wireless transmissions cancelled after overhearing an
    /// equivalent packet.
    pub suppressed: u64,
    pub pit_created: u64,
    pub pit_satisfied: u64,
    pub pit_nacked: u64,
}

impl Counters {
    pub fn total_packets(&self) -> u64 {
        self.interests_sent + self.data_sent + self.nacks_sent
    }

    pub fn accumulate(&mut self, o: &Counters) {
        self.interests_sent += o.interests_sent;
        self.data_sent += o.data_sent;
        self.nacks_sent += o.nacks_sent;
        self.interests_received += o.interests_received;
        self.data_received += o.data_received;
        self.nacks_received += o.nacks_received;
        self.cs_hits += o.cs_hits;
        self.drops_unsolicited += o.drops_unsolicited;
        self.drops_scope += o.drops_scope;
        self.drops_duplicate += o.drops_duplicate;
        self.nacks_absorbed += o.nacks_absorbed;
        self.suppressed += o.suppressed;
        self.pit_created += o.pit_created;
        self.pit_satisfied += o.pit_satisfied;
        self.pit_nacked += o.pit_nacked;
    }
}

/// Side effects of one pipeline step, executed by the simulation driver.
#[derive(Debug, Clone, PartialEq)]
pub enum Emission {
    /// A wireless transmission has been queued; the driver calls
    /// [`ForwarderNode::transmit`] with `token` after `delay`.
    Wireless { token: u64, delay: SimTime },
    /// Hand `packet` to the application behind `face`.
    App { face: FaceId, packet: Packet },
    /// Poll PIT expiry at this time.
    PitTimer { at: SimTime },
}

#[derive(Debug, Default)]
pub struct Effects {
    pub emissions: Vec<Emission>,
    pub trace: Vec<TraceRecord>,
}

impl Effects {
    pub fn clear(&mut self) {
        self.emissions.clear();
        self.trace.clear();
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwarderConfig {
    pub strategy: Strategy,
    pub cs_capacity: usize,
    /// Upper bound of the multicast-vanet rebroadcast delay.
    pub vanet_jitter_max: SimTime,
    /// How long nonces of satisfied or CS-answered interests are remembered
    /// to drop late copies of the same interest.
    pub dead_nonce_ttl: SimTime,
}

impl Default for ForwarderConfig {
    fn default() -> Self {
        Self {
            strategy: Strategy::Multicast,
            cs_capacity: 1000,
            vanet_jitter_max: SimTime::from_millis(10),
            dead_nonce_ttl: SimTime::from_millis(100),
        }
    }
}

#[derive(Debug, Clone)]
struct PendingTx {
    packet: Packet,
}

/// NDN forwarding pipeline of one node.
#[derive(Debug, Clone)]
pub struct ForwarderNode {
    node_id: u32,
    config: ForwarderConfig,
    faces: Vec<Face>,
    pub cs: ContentStore,
    pub pit: Pit,
    pub fib: Fib,
    counters: Counters,
    pending_tx: BTreeMap<u64, PendingTx>,
    next_token: u64,
    registered: BTreeSet<Name>,
    dead_nonces: BTreeSet<(Name, u32)>,
    dead_order: VecDeque<(SimTime, Name, u32)>,
}

impl ForwarderNode {
    pub fn new(node_id: u32, config: ForwarderConfig) -> Self {
        Self {
            node_id,
            config,
            faces: vec![Face {
                id: FaceId::WIRELESS,
                kind: FaceKind::WirelessAdhoc,
                owner_node: node_id,
            }],
            cs: ContentStore::new(config.cs_capacity),
            pit: Pit::new(),
            fib: Fib::new(),
            counters: Counters::default(),
            pending_tx: BTreeMap::new(),
            next_token: 0,
            registered: BTreeSet::new(),
            dead_nonces: BTreeSet::new(),
            dead_order: VecDeque::new(),
        }
    }

    pub fn node_id(&self) -> u32 {
        self.node_id
    }

    pub fn strategy(&self) -> Strategy {
        self.config.strategy
    }

    pub fn counters(&self) -> &Counters {
        &self.counters
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face_kind(&self, face: FaceId) -> Option<FaceKind> {
        self.faces.get(face.0 as usize).map(|f| f.kind)
    }

    pub fn pending_transmissions(&self) -> usize {
        self.pending_tx.len()
    }

    /// Clears tables, app faces, routes and queued transmissions. Counters are
    /// kept so totals survive node reuse.
    pub fn reset(&mut self) {
        self.faces.truncate(1);
        self.cs = ContentStore::new(self.config.cs_capacity);
        self.pit = Pit::new();
        self.fib.clear();
        self.pending_tx.clear();
        self.registered.clear();
        self.dead_nonces.clear();
        self.dead_order.clear();
    }

    fn purge_dead_nonces(&mut self, now: SimTime) {
        while let Some((at, _, _)) = self.dead_order.front() {
            if *at > now {
                break;
            }
            let (_, name, nonce) = self.dead_order.pop_front().unwrap();
            self.dead_nonces.remove(&(name, nonce));
        }
    }

    fn bury_nonce(&mut self, name: &Name, nonce: u32, now: SimTime) {
        if self.config.dead_nonce_ttl == SimTime::ZERO {
            return;
        }
        if self.dead_nonces.insert((name.clone(), nonce)) {
            self.dead_order.push_back((now + self.config.dead_nonce_ttl, name.clone(), nonce));
        }
    }

    /// Whether this interest instance was already answered here recently.
    pub fn is_dead_nonce(&self, name: &Name, nonce: u32) -> bool {
        self.dead_nonces.contains(&(name.clone(), nonce))
    }

    pub fn add_app_face(&mut self) -> FaceId {
        let id = FaceId(self.faces.len() as u32);
        self.faces.push(Face {
            id,
            kind: FaceKind::App,
            owner_node: self.node_id,
        });
        id
    }

    /// Routes interests under `prefix` to the application behind `app_face`.
    pub fn register_prefix(&mut self, prefix: Name, app_face: FaceId) -> Result<(), ForwarderError> {
        if self.face_kind(app_face) != Some(FaceKind::App) {
            return Err(ForwarderError::NotAnAppFace(app_face));
        }
        if !self.registered.insert(prefix.clone()) {
            return Err(ForwarderError::DuplicatePrefix(prefix));
        }
        self.fib.add_next_hop(prefix, app_face);
        Ok(())
    }

    pub fn add_route(&mut self, prefix: Name, face: FaceId) {
        self.fib.add_next_hop(prefix, face);
    }

    fn kind_of(&self, face: FaceId) -> FaceKind {
        self.face_kind(face).unwrap_or(FaceKind::WirelessAdhoc)
    }

    pub(super) fn record(
        &self,
        fx: &mut Effects,
        now: SimTime,
        face: FaceId,
        dir: Direction,
        packet: &Packet,
        verdict: Verdict,
    ) {
        fx.trace.push(TraceRecord {
            time: now,
            node: self.node_id,
            face_kind: self.kind_of(face),
            dir,
            kind: packet.kind(),
            name: packet.name().clone(),
            nonce: packet.nonce(),
            verdict,
        });
    }

    /// Sends `packet` out of `face`: app faces get it immediately, the
    /// wireless face goes through the transmit queue.
    pub(super) fn send<R: Rng + ?Sized>(
        &mut self,
        face: FaceId,
        packet: Packet,
        now: SimTime,
        rng: &mut R,
        fx: &mut Effects,
    ) {
        match self.kind_of(face) {
            FaceKind::App => {
                self.record(fx, now, face, Direction::Out, &packet, Verdict::Delivered);
                fx.emissions.push(Emission::App { face, packet });
            }
            FaceKind::WirelessAdhoc => {
                let delay = self.tx_delay(rng);
                let token = self.next_token;
                self.next_token += 1;
                self.pending_tx.insert(token, PendingTx { packet });
                fx.emissions.push(Emission::Wireless { token, delay });
            }
        }
    }

    fn tx_delay<R: Rng + ?Sized>(&self, rng: &mut R) -> SimTime {
        match self.config.strategy {
            Strategy::MulticastVanet if self.config.vanet_jitter_max > SimTime::ZERO => {
                SimTime::from_micros(rng.random_range(0..=self.config.vanet_jitter_max.as_micros()))
            }
            _ => SimTime::ZERO,
        }
    }

    /// Releases a queued wireless transmission. `None` if it was cancelled.
    pub fn transmit(&mut self, token: u64, now: SimTime, fx: &mut Effects) -> Option<Packet> {
        let tx = self.pending_tx.remove(&token)?;
        match &tx.packet {
            Packet::Interest(_) => self.counters.interests_sent += 1,
            Packet::Data(_) => self.counters.data_sent += 1,
            Packet::Nack(_) => self.counters.nacks_sent += 1,
        }
        self.record(fx, now, FaceId::WIRELESS, Direction::Out, &tx.packet, Verdict::Sent);
        Some(tx.packet)
    }

    pub(super) fn bump_pit_nacked(&mut self) {
        self.counters.pit_nacked += 1;
    }

    /// Drops queued transmissions matching `pred`; returns how many went.
    fn cancel_pending<F: Fn(&Packet) -> bool>(&mut self, pred: F) -> usize {
        let before = self.pending_tx.len();
        self.pending_tx.retain(|_, tx| !pred(&tx.packet));
        let gone = before - self.pending_tx.len();
        self.counters.suppressed += gone as u64;
        gone
    }

    pub fn on_incoming_interest<R: Rng + ?Sized>(
        &mut self,
        in_face: FaceId,
        interest: Interest,
        now: SimTime,
        rng: &mut R,
        fx: &mut Effects,
    ) {
        let in_kind = self.kind_of(in_face);
        if in_kind == FaceKind::WirelessAdhoc {
            self.counters.interests_received += 1;
        }
        let packet = Packet::Interest(interest.clone());

        // (1) scope: a localhop interest heard on the air may only reach local apps
        if in_kind == FaceKind::WirelessAdhoc && interest.name.first_is(crate::ndn::schema::LOCALHOP) {
            let reaches_app = self.fib.lpm(&interest.name).is_some_and(|e| {
                e.next_hops.iter().any(|&f| {
                    f != in_face && !violates_scope(&interest.name, in_kind, self.kind_of(f))
                })
            });
            if !reaches_app {
                self.counters.drops_scope += 1;
                self.record(fx, now, in_face, Direction::In, &packet, Verdict::Scope);
                return;
            }
        }

        // (2) late copy of an interest this node already answered
        self.purge_dead_nonces(now);
        if self.is_dead_nonce(&interest.name, interest.nonce) {
            self.counters.drops_duplicate += 1;
            self.record(fx, now, in_face, Direction::In, &packet, Verdict::Duplicate);
            return;
        }

        // (3) content store
        if let Some(data) = self.cs.find(&interest, now) {
            self.counters.cs_hits += 1;
            self.bury_nonce(&interest.name, interest.nonce, now);
            self.record(fx, now, in_face, Direction::In, &packet, Verdict::CsHit);
            self.send(in_face, Packet::Data(data), now, rng, fx);
            return;
        }

        // (4) pending interest table
        match self.pit.insert_or_aggregate(&interest, in_face, now) {
            PitInsert::DuplicateNonce => {
                self.counters.drops_duplicate += 1;
                self.record(fx, now, in_face, Direction::In, &packet, Verdict::Duplicate);
                if self.config.strategy == Strategy::MulticastVanet && in_kind == FaceKind::WirelessAdhoc {
                    // a neighbour already rebroadcast this copy, so the Data
                    // will come back through it rather than through us
                    let (name, nonce) = (&interest.name, interest.nonce);
                    if self.cancel_pending(|p| matches!(p, Packet::Interest(i) if &i.name == name && i.nonce == nonce)) > 0 {
                        self.pit.remove_out_record(name, FaceId::WIRELESS);
                    }
                }
            }
            PitInsert::Aggregated => {
                self.record(fx, now, in_face, Direction::In, &packet, Verdict::Aggregated);
                let at = self.pit.get(&interest.name).map(|e| e.expiry).unwrap();
                fx.emissions.push(Emission::PitTimer { at });
            }
            PitInsert::NewEntry => {
                self.counters.pit_created += 1;
                let at = self.pit.get(&interest.name).map(|e| e.expiry).unwrap();
                fx.emissions.push(Emission::PitTimer { at });
                match self.config.strategy {
                    Strategy::Multicast => self.dispatch_multicast(in_face, interest, now, rng, fx),
                    Strategy::MulticastVanet => self.dispatch_multicast_vanet(in_face, interest, now, rng, fx),
                }
            }
        }
    }

    pub fn on_incoming_data<R: Rng + ?Sized>(
        &mut self,
        in_face: FaceId,
        data: Data,
        now: SimTime,
        rng: &mut R,
        fx: &mut Effects,
    ) {
        let in_kind = self.kind_of(in_face);
        let vanet = self.config.strategy == Strategy::MulticastVanet;
        if in_kind == FaceKind::WirelessAdhoc {
            self.counters.data_received += 1;
            if vanet {
                let name = &data.name;
                self.cancel_pending(|p| matches!(p, Packet::Data(d) if &d.name == name));
            }
        }
        let packet = Packet::Data(data.clone());
        let matched = self.pit.match_data(&data, now);
        if matched.is_empty() {
            self.counters.drops_unsolicited += 1;
            self.record(fx, now, in_face, Direction::In, &packet, Verdict::Unsolicited);
            return;
        }
        self.counters.pit_satisfied += matched.len() as u64;
        self.purge_dead_nonces(now);
        for e in &matched {
            for n in e.in_records.iter().map(|r| r.nonce).chain(e.out_records.iter().map(|r| r.nonce)) {
                self.bury_nonce(&e.name, n, now);
            }
        }
        self.record(fx, now, in_face, Direction::In, &packet, Verdict::Satisfied);
        self.cs.insert(data.clone(), now);
        if vanet {
            let names: Vec<&Name> = matched.iter().map(|e| &e.name).collect();
            self.cancel_pending(|p| matches!(p, Packet::Interest(i) if names.contains(&&i.name)));
        }

        let downstream: BTreeSet<FaceId> = matched
            .iter()
            .flat_map(|e| e.in_records.iter().map(|r| r.face))
            .collect();
        // only a node that actually relayed the interest carries the Data back
        let relayed = matched
            .iter()
            .any(|e| e.out_records.iter().any(|r| r.face == FaceId::WIRELESS));
        for face in downstream {
            let back_on_air = vanet && relayed && face == in_face && in_kind == FaceKind::WirelessAdhoc;
            if face == in_face && !back_on_air {
                continue;
            }
            self.send(face, packet.clone(), now, rng, fx);
        }
    }

    pub fn on_incoming_nack<R: Rng + ?Sized>(
        &mut self,
        in_face: FaceId,
        nack: Nack,
        now: SimTime,
        rng: &mut R,
        fx: &mut Effects,
    ) {
        if self.kind_of(in_face) == FaceKind::WirelessAdhoc {
            self.counters.nacks_received += 1;
        }
        let packet = Packet::Nack(nack.clone());
        let Some(entry) = self.pit.get(&nack.name) else {
            self.record(fx, now, in_face, Direction::In, &packet, Verdict::NackDropped);
            return;
        };
        match self.config.strategy {
            Strategy::MulticastVanet => {
                self.counters.nacks_absorbed += 1;
                self.record(fx, now, in_face, Direction::In, &packet, Verdict::NackAbsorbed);
            }
            Strategy::Multicast => {
                let answers_us = entry
                    .out_records
                    .iter()
                    .any(|r| r.face == in_face && r.nonce == nack.nonce);
                if !answers_us {
                    self.record(fx, now, in_face, Direction::In, &packet, Verdict::NackDropped);
                    return;
                }
                let entry = self.pit.remove(&nack.name).unwrap();
                self.counters.pit_nacked += 1;
                self.record(fx, now, in_face, Direction::In, &packet, Verdict::NackConsumed);
                for rec in entry.in_records.iter().filter(|r| r.face != in_face) {
                    let downstream = Nack {
                        reason: nack.reason,
                        name: nack.name.clone(),
                        nonce: rec.nonce,
                    };
                    self.send(rec.face, Packet::Nack(downstream), now, rng, fx);
                }
            }
        }
    }

    /// Drops expired PIT entries; returns how many went.
    pub fn sweep_pit(&mut self, now: SimTime) -> usize {
        self.pit.expire(now).len()
    }
}
