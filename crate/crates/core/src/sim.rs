//! Couples the forwarders, the radio medium, the node pool, mobility and
//! applications into one event-driven run.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::apps::{
    App, AppAction, AppContext, BeaconApp, BeaconConfig, Outcome, ScriptedApp, TmsConfig, TmsConsumer, TmsProducer,
};
use crate::forwarder::{Counters, Direction, Effects, Emission, ForwarderConfig, TraceRecord, Verdict};
use crate::mobility::{Mobility, MobilityError, VehicleView};
use crate::ndn::schema::{traffic_prefix, VehicleKind, BEACON, LOCALHOP, SERVICE};
use crate::ndn::{decode_packet, encode_packet, Interest, Name, Packet};
use crate::netsim::{EventId, EventQueue, Medium, MediumError, NodePool, PoolError, Position, RadioConfig};
use crate::tables::{FaceId, FaceKind};
use crate::time::SimTime;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Medium(#[from] MediumError),
    #[error(transparent)]
    Pool(#[from] PoolError),
    #[error("node {node}: {msg}")]
    Setup { node: String, msg: String },
}

/// Application to install on a node.
#[derive(Debug, Clone)]
pub enum AppSpec {
    Beacon(BeaconConfig),
    TmsConsumer(TmsConfig),
    TmsProducer { cfg: TmsConfig, monitored: BTreeSet<String> },
    Scripted(ScriptedApp),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    /// Routes `/service` onto the air.
    Vehicle,
    /// Infrastructure; serves from its own apps only.
    Rsu,
}

/// A node that exists for the whole run at a fixed position.
#[derive(Debug, Clone)]
pub struct StaticNode {
    pub label: String,
    pub position: Position,
    pub role: NodeRole,
    pub kind: VehicleKind,
    pub road: String,
    pub lane: u32,
    /// Route the node reports to its apps; starts with `road`.
    pub route: Vec<String>,
    pub apps: Vec<AppSpec>,
    /// Additional prefixes routed onto the wireless face.
    pub routes: Vec<Name>,
}

impl StaticNode {
    pub fn new(label: &str, position: Position, role: NodeRole) -> Self {
        Self {
            label: label.to_string(),
            position,
            role,
            kind: VehicleKind::Passenger,
            road: String::new(),
            lane: 0,
            route: Vec::new(),
            apps: Vec::new(),
            routes: Vec::new(),
        }
    }

    pub fn with_app(mut self, app: AppSpec) -> Self {
        self.apps.push(app);
        self
    }

    pub fn with_route(mut self, prefix: Name) -> Self {
        self.routes.push(prefix);
        self
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub forwarder: ForwarderConfig,
    pub radio: RadioConfig,
    pub duration: SimTime,
    pub tick: SimTime,
    pub pool_capacity: usize,
    pub trace: bool,
    /// Apps installed on every spawned vehicle.
    pub vehicle_apps: Vec<AppSpec>,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            forwarder: ForwarderConfig::default(),
            radio: RadioConfig::default(),
            duration: SimTime::from_secs(60),
            tick: SimTime::from_millis(100),
            pool_capacity: 0,
            trace: false,
            vehicle_apps: Vec::new(),
            seed: 0,
        }
    }
}

/// Outcome counts of tracked app interests.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AppTally {
    pub expressed: u64,
    pub data: u64,
    pub nack: u64,
    pub timeout: u64,
}

impl AppTally {
    fn add(&mut self, o: Outcome) {
        match o {
            Outcome::Data => self.data += 1,
            Outcome::Nack => self.nack += 1,
            Outcome::Timeout => self.timeout += 1,
        }
    }

    pub fn resolved(&self) -> u64 {
        self.data + self.nack + self.timeout
    }

    /// Share of expressed interests answered with Data.
    pub fn satisfaction(&self) -> Option<f64> {
        (self.expressed > 0).then(|| self.data as f64 / self.expressed as f64)
    }
}

#[derive(Debug, Clone)]
struct Frame {
    id: u64,
    sender: u32,
    bytes: Vec<u8>,
}

#[derive(Debug, Clone)]
enum Event {
    Init,
    MobilityTick,
    Transmit { node: u32, epoch: u64, token: u64 },
    Frame { to: u32, epoch: u64, frame: Arc<Frame>, lost: bool },
    Inject { node: u32, packet: Packet },
    AppDeliver { node: u32, epoch: u64, face: FaceId, packet: Packet },
    AppTimer { node: u32, epoch: u64, app: usize, tag: u64 },
    AppTimeout { pending: u64 },
    PitTimer { node: u32, epoch: u64 },
}

#[derive(Debug, Clone)]
struct Pending {
    node: u32,
    app: usize,
    interest: Interest,
    timeout: EventId,
}

#[derive(Debug, Clone)]
struct StaticInfo {
    kind: VehicleKind,
    road: String,
    lane: u32,
    route: Vec<String>,
}

/// One simulation run.
pub struct Simulation {
    cfg: SimConfig,
    queue: EventQueue<Event>,
    pool: NodePool,
    medium: Medium,
    mobility: Mobility,
    apps: Vec<Vec<App>>,
    statics: BTreeMap<u32, StaticInfo>,
    pending: BTreeMap<u64, Pending>,
    next_pending: u64,
    next_frame: u64,
    net_rng: ChaCha8Rng,
    app_rng: ChaCha8Rng,
    trace: Vec<String>,
    tallies: BTreeMap<String, AppTally>,
    frames_sent: u64,
    frames_delivered: u64,
    command_errors: u64,
    started: bool,
}

/// RNG stream ids; mobility draws from its own stream so the traffic is the
/// same across forwarding strategies.
pub const STREAM_MOBILITY: u64 = 1;
pub const STREAM_NETWORK: u64 = 2;
pub const STREAM_APPS: u64 = 3;

pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn beacon_prefix() -> Name {
    Name::from_components([LOCALHOP, BEACON]).unwrap()
}

fn service_prefix() -> Name {
    Name::from_components([SERVICE]).unwrap()
}

impl Simulation {
    pub fn new(cfg: SimConfig, mobility: Mobility, statics: Vec<StaticNode>) -> Result<Self, SimError> {
        let pool = NodePool::new(cfg.pool_capacity, cfg.forwarder);
        let mut sim = Self {
            queue: EventQueue::new(),
            medium: Medium::new(cfg.radio),
            apps: vec![Vec::new(); pool.len()],
            pool,
            mobility,
            statics: BTreeMap::new(),
            pending: BTreeMap::new(),
            next_pending: 0,
            next_frame: 0,
            net_rng: rng_stream(cfg.seed, STREAM_NETWORK),
            app_rng: rng_stream(cfg.seed, STREAM_APPS),
            trace: Vec::new(),
            tallies: BTreeMap::new(),
            frames_sent: 0,
            frames_delivered: 0,
            command_errors: 0,
            started: false,
            cfg,
        };
        for s in statics {
            let id = sim.pool.add_static(&s.label, s.position, sim.cfg.forwarder);
            sim.apps.push(Vec::new());
            sim.statics.insert(
                id,
                StaticInfo {
                    kind: s.kind,
                    road: s.road.clone(),
                    lane: s.lane,
                    route: s.route.clone(),
                },
            );
            sim.setup_node(id, s.role, &s.routes, &s.apps)?;
        }
        Ok(sim)
    }

    fn setup_node(&mut self, id: u32, role: NodeRole, routes: &[Name], apps: &[AppSpec]) -> Result<(), SimError> {
        let label = self.label(id);
        let fwd = &mut self.pool.node_mut(id).fwd;
        if role == NodeRole::Vehicle {
            fwd.add_route(service_prefix(), FaceId::WIRELESS);
        }
        for r in routes {
            fwd.add_route(r.clone(), FaceId::WIRELESS);
        }
        let mut installed = Vec::with_capacity(apps.len());
        for spec in apps {
            let face = fwd.add_app_face();
            let setup_err = |e: crate::forwarder::ForwarderError| SimError::Setup {
                node: label.clone(),
                msg: e.to_string(),
            };
            let app = match spec {
                AppSpec::Beacon(c) => {
                    fwd.register_prefix(beacon_prefix(), face).map_err(setup_err)?;
                    fwd.add_route(beacon_prefix(), FaceId::WIRELESS);
                    App::Beacon(BeaconApp::new(*c))
                }
                AppSpec::TmsConsumer(c) => App::TmsConsumer(TmsConsumer::new(*c)),
                AppSpec::TmsProducer { cfg, monitored } => {
                    fwd.register_prefix(traffic_prefix(), face).map_err(setup_err)?;
                    App::TmsProducer(TmsProducer::new(*cfg, monitored.clone()))
                }
                AppSpec::Scripted(a) => {
                    for p in a.prefixes() {
                        fwd.register_prefix(p, face).map_err(setup_err)?;
                    }
                    App::Scripted(a.clone())
                }
            };
            installed.push(app);
        }
        self.apps[id as usize] = installed;
        Ok(())
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn now(&self) -> SimTime {
        self.queue.now()
    }

    pub fn pool(&self) -> &NodePool {
        &self.pool
    }

    pub fn mobility(&self) -> &Mobility {
        &self.mobility
    }

    pub fn medium(&self) -> &Medium {
        &self.medium
    }

    /// Vehicle id or static label of a node; empty for a free pool slot.
    pub fn label(&self, id: u32) -> String {
        self.pool.node(id).vehicle.clone().unwrap_or_default()
    }

    pub fn node_by_label(&self, label: &str) -> Option<u32> {
        (0..self.pool.len() as u32).find(|&i| self.pool.node(i).vehicle.as_deref() == Some(label))
    }

    pub fn apps(&self, node: u32) -> &[App] {
        &self.apps[node as usize]
    }

    pub fn trace(&self) -> &[String] {
        &self.trace
    }

    pub fn take_trace(&mut self) -> Vec<String> {
        std::mem::take(&mut self.trace)
    }

    /// Outcome counts per vehicle id / static label.
    pub fn tallies(&self) -> &BTreeMap<String, AppTally> {
        &self.tallies
    }

    pub fn tally_total(&self) -> AppTally {
        let mut t = AppTally::default();
        for v in self.tallies.values() {
            t.expressed += v.expressed;
            t.data += v.data;
            t.nack += v.nack;
            t.timeout += v.timeout;
        }
        t
    }

    /// Sum of all forwarder counters, including nodes no longer active.
    pub fn counters_total(&self) -> Counters {
        let mut c = Counters::default();
        for n in self.pool.nodes() {
            c.accumulate(n.fwd.counters());
        }
        c
    }

    pub fn frames_sent(&self) -> u64 {
        self.frames_sent
    }

    pub fn frames_delivered(&self) -> u64 {
        self.frames_delivered
    }

    /// Vehicle commands (lane or route changes) that were rejected.
    pub fn command_errors(&self) -> u64 {
        self.command_errors
    }

    /// Delivers `packet` to `node`'s wireless face at `at`, as if received
    /// from the air.
    pub fn inject_frame(&mut self, at: SimTime, node: u32, packet: Packet) {
        self.queue.schedule_at(at, Event::Inject { node, packet });
    }

    /// Runs until the configured duration.
    pub fn run(&mut self) -> Result<(), SimError> {
        self.run_until(self.cfg.duration)
    }

    pub fn run_until(&mut self, until: SimTime) -> Result<(), SimError> {
        if !self.started {
            self.started = true;
            self.queue.schedule_at(SimTime::ZERO, Event::Init);
        }
        while let Some((_, ev)) = self.queue.pop_until(until) {
            self.handle(ev)?;
        }
        Ok(())
    }

    fn emit(&mut self, rec: TraceRecord) {
        if self.cfg.trace {
            self.trace.push(rec.to_string());
        }
    }

    fn flush_trace(&mut self, fx: &mut Effects) {
        if self.cfg.trace {
            self.trace.extend(fx.trace.drain(..).map(|r| r.to_string()));
        } else {
            fx.trace.clear();
        }
    }

    fn handle(&mut self, ev: Event) -> Result<(), SimError> {
        match ev {
            Event::Init => {
                let statics: Vec<u32> = self.statics.keys().copied().collect();
                for id in statics {
                    self.start_apps(id);
                }
                let events = self.mobility.spawn_initial();
                self.apply_mobility(events)?;
                self.queue.schedule(self.cfg.tick, Event::MobilityTick);
            }
            Event::MobilityTick => {
                let events = self.mobility.step();
                self.apply_mobility(events)?;
                if self.now() + self.cfg.tick <= self.cfg.duration {
                    self.queue.schedule(self.cfg.tick, Event::MobilityTick);
                }
            }
            Event::Transmit { node, epoch, token } => {
                if self.pool.is_current(node, epoch) {
                    self.transmit(node, token)?;
                }
            }
            Event::Frame { to, epoch, frame, lost } => {
                if self.pool.is_current(to, epoch) {
                    self.receive_frame(to, &frame, lost);
                }
            }
            Event::Inject { node, packet } => {
                if self.pool.node(node).active {
                    self.receive_packet(node, packet);
                }
            }
            Event::AppDeliver {
                node,
                epoch,
                face,
                packet,
            } => {
                if self.pool.is_current(node, epoch) {
                    self.deliver_to_app(node, face, packet);
                }
            }
            Event::AppTimer { node, epoch, app, tag } => {
                if self.pool.is_current(node, epoch) {
                    let actions = self.with_app(node, app, |a, ctx| a.on_timer(ctx, tag));
                    self.apply_actions(node, app, actions);
                }
            }
            Event::AppTimeout { pending } => {
                if let Some(p) = self.pending.remove(&pending) {
                    self.resolve(p, Outcome::Timeout, None);
                }
            }
            Event::PitTimer { node, epoch } => {
                if self.pool.is_current(node, epoch) {
                    let now = self.now();
                    self.pool.node_mut(node).fwd.sweep_pit(now);
                }
            }
        }
        Ok(())
    }

    fn apply_mobility(&mut self, events: crate::mobility::StepEvents) -> Result<(), SimError> {
        for v in &events.arrived {
            self.deactivate(v)?;
        }
        for v in &events.spawned {
            let pos = self.mobility.position(v).unwrap_or(Position::PARKED);
            let id = self.pool.activate(v, pos)?;
            let specs = self.cfg.vehicle_apps.clone();
            self.setup_node(id, NodeRole::Vehicle, &[], &specs)?;
            self.start_apps(id);
        }
        let moves: Vec<(u32, Position)> = self
            .pool
            .nodes()
            .iter()
            .enumerate()
            .filter(|(_, n)| n.active && !n.is_static)
            .filter_map(|(i, n)| Some((i as u32, self.mobility.position(n.vehicle.as_deref()?)?)))
            .collect();
        for (id, p) in moves {
            self.pool.set_position(id, p);
        }
        Ok(())
    }

    fn deactivate(&mut self, vehicle: &str) -> Result<(), SimError> {
        let Some(id) = self.pool.node_of(vehicle) else {
            return Ok(());
        };
        // pending interests vanish without callbacks
        let gone: Vec<u64> = self.pending.iter().filter(|(_, p)| p.node == id).map(|(k, _)| *k).collect();
        for k in gone {
            let p = self.pending.remove(&k).unwrap();
            self.queue.cancel(p.timeout);
        }
        self.pool.deactivate(vehicle)?;
        self.apps[id as usize].clear();
        Ok(())
    }

    fn start_apps(&mut self, node: u32) {
        for i in 0..self.apps[node as usize].len() {
            let actions = self.with_app(node, i, |a, ctx| a.start(ctx));
            self.apply_actions(node, i, actions);
        }
    }

    fn view_of(&self, node: u32) -> Option<VehicleView> {
        let n = self.pool.node(node);
        match self.statics.get(&node) {
            Some(s) => Some(VehicleView {
                kind: s.kind,
                edge: s.road.clone(),
                lane: s.lane,
                speed: 0.0,
                position: n.position,
                remaining: s.route.clone(),
            }),
            None => self.mobility.view(n.vehicle.as_deref()?),
        }
    }

    fn with_app<T>(&mut self, node: u32, app: usize, f: impl FnOnce(&mut App, &mut AppContext) -> T) -> T {
        let view = self.view_of(node);
        let label = self.label(node);
        let now = self.now();
        let mut ctx = AppContext {
            now,
            label: &label,
            vehicle: view.as_ref(),
            mobility: &self.mobility,
            rng: &mut self.app_rng,
        };
        f(&mut self.apps[node as usize][app], &mut ctx)
    }

    fn app_face(app: usize) -> FaceId {
        FaceId(app as u32 + 1)
    }

    fn apply_actions(&mut self, node: u32, app: usize, actions: Vec<AppAction>) {
        let epoch = self.pool.node(node).epoch;
        for action in actions {
            match action {
                AppAction::Express { interest, tracked } => {
                    if tracked {
                        let id = self.next_pending;
                        self.next_pending += 1;
                        let lifetime = SimTime::from_millis(interest.lifetime_ms as u64);
                        let timeout = self.queue.schedule(lifetime, Event::AppTimeout { pending: id });
                        self.pending.insert(
                            id,
                            Pending {
                                node,
                                app,
                                interest: interest.clone(),
                                timeout,
                            },
                        );
                        self.tallies.entry(self.label(node)).or_default().expressed += 1;
                    }
                    let now = self.now();
                    let mut fx = Effects::default();
                    self.pool.node_mut(node).fwd.on_incoming_interest(
                        Self::app_face(app),
                        interest,
                        now,
                        &mut self.net_rng,
                        &mut fx,
                    );
                    self.process_effects(node, fx);
                }
                AppAction::PutData(data) => {
                    let now = self.now();
                    let mut fx = Effects::default();
                    self.pool.node_mut(node).fwd.on_incoming_data(
                        Self::app_face(app),
                        data,
                        now,
                        &mut self.net_rng,
                        &mut fx,
                    );
                    self.process_effects(node, fx);
                }
                AppAction::SetLane(lane) => {
                    if let Some(s) = self.statics.get_mut(&node) {
                        s.lane = lane;
                    } else if let Some(v) = self.pool.node(node).vehicle.clone() {
                        if self.mobility.set_lane(&v, lane).is_err() {
                            self.command_errors += 1;
                        }
                    }
                }
                AppAction::SetRoute(route) => {
                    let result = match self.pool.node(node).vehicle.clone() {
                        Some(v) if !self.statics.contains_key(&node) => self.mobility.set_route(&v, &route),
                        _ => Err(MobilityError::UnknownVehicle(self.label(node))),
                    };
                    if result.is_err() {
                        self.command_errors += 1;
                    }
                }
                AppAction::Timer { delay, tag } => {
                    self.queue.schedule(delay, Event::AppTimer { node, epoch, app, tag });
                }
            }
        }
    }

    fn process_effects(&mut self, node: u32, mut fx: Effects) {
        self.flush_trace(&mut fx);
        let epoch = self.pool.node(node).epoch;
        let backoff_us = (self.cfg.radio.mac_backoff_ms * 1000.0).round() as u64;
        for e in fx.emissions {
            match e {
                Emission::Wireless { token, delay } => {
                    let backoff = if backoff_us > 0 {
                        SimTime::from_micros(self.net_rng.random_range(0..=backoff_us))
                    } else {
                        SimTime::ZERO
                    };
                    self.queue.schedule(delay + backoff, Event::Transmit { node, epoch, token });
                }
                Emission::App { face, packet } => {
                    self.queue.schedule(
                        SimTime::ZERO,
                        Event::AppDeliver {
                            node,
                            epoch,
                            face,
                            packet,
                        },
                    );
                }
                Emission::PitTimer { at } => {
                    self.queue.schedule_at(at, Event::PitTimer { node, epoch });
                }
            }
        }
    }

    fn transmit(&mut self, node: u32, token: u64) -> Result<(), SimError> {
        let now = self.now();
        let mut fx = Effects::default();
        let packet = self.pool.node_mut(node).fwd.transmit(token, now, &mut fx);
        self.flush_trace(&mut fx);
        let Some(packet) = packet else {
            return Ok(());
        };
        let bytes = encode_packet(&packet);
        let id = self.next_frame;
        self.next_frame += 1;
        let stations = self.pool.stations();
        let sender = stations[node as usize];
        let deliveries = self
            .medium
            .broadcast(&sender, bytes.len(), now, id, &stations, &mut self.net_rng)?;
        self.frames_sent += 1;
        let frame = Arc::new(Frame { id, sender: node, bytes });
        for d in deliveries {
            let epoch = self.pool.node(d.to).epoch;
            self.queue.schedule_at(
                d.at,
                Event::Frame {
                    to: d.to,
                    epoch,
                    frame: Arc::clone(&frame),
                    lost: d.lost,
                },
            );
        }
        Ok(())
    }

    fn medium_record(&mut self, node: u32, packet: &Packet, verdict: Verdict) {
        let rec = TraceRecord {
            time: self.now(),
            node,
            face_kind: FaceKind::WirelessAdhoc,
            dir: Direction::In,
            kind: packet.kind(),
            name: packet.name().clone(),
            nonce: packet.nonce(),
            verdict,
        };
        self.emit(rec);
    }

    fn receive_frame(&mut self, to: u32, frame: &Frame, lost: bool) {
        let now = self.now();
        let collided = self.medium.collided(to, frame.id, now);
        let packet = match decode_packet(&frame.bytes) {
            Ok(p) => p,
            Err(_) => {
                if self.cfg.trace {
                    self.trace.push(format!("{now} {to} wireless in unknown / - malformed"));
                }
                return;
            }
        };
        debug_assert_ne!(frame.sender, to);
        if lost {
            self.medium_record(to, &packet, Verdict::Lost);
            return;
        }
        if collided {
            self.medium_record(to, &packet, Verdict::Collision);
            return;
        }
        self.frames_delivered += 1;
        self.receive_packet(to, packet);
    }

    fn receive_packet(&mut self, to: u32, packet: Packet) {
        let now = self.now();
        let mut fx = Effects::default();
        let fwd = &mut self.pool.node_mut(to).fwd;
        match packet {
            Packet::Interest(mut i) => {
                i.hop_count = i.hop_count.saturating_add(1);
                fwd.on_incoming_interest(FaceId::WIRELESS, i, now, &mut self.net_rng, &mut fx);
            }
            Packet::Data(d) => fwd.on_incoming_data(FaceId::WIRELESS, d, now, &mut self.net_rng, &mut fx),
            Packet::Nack(n) => fwd.on_incoming_nack(FaceId::WIRELESS, n, now, &mut self.net_rng, &mut fx),
        }
        self.process_effects(to, fx);
    }

    fn deliver_to_app(&mut self, node: u32, face: FaceId, packet: Packet) {
        let Some(app) = (face.0 as usize).checked_sub(1) else {
            return;
        };
        if app >= self.apps[node as usize].len() {
            return;
        }
        match packet {
            Packet::Interest(i) => {
                let actions = self.with_app(node, app, |a, ctx| a.on_interest(ctx, &i));
                self.apply_actions(node, app, actions);
            }
            Packet::Data(d) => {
                let hits: Vec<u64> = self
                    .pending
                    .iter()
                    .filter(|(_, p)| p.node == node && p.app == app && p.interest.matches_data(&d))
                    .map(|(k, _)| *k)
                    .collect();
                for k in hits {
                    let p = self.pending.remove(&k).unwrap();
                    self.queue.cancel(p.timeout);
                    self.resolve(p, Outcome::Data, Some(Packet::Data(d.clone())));
                }
            }
            Packet::Nack(n) => {
                let hits: Vec<u64> = self
                    .pending
                    .iter()
                    .filter(|(_, p)| {
                        p.node == node && p.app == app && p.interest.name == n.name && p.interest.nonce == n.nonce
                    })
                    .map(|(k, _)| *k)
                    .collect();
                for k in hits {
                    let p = self.pending.remove(&k).unwrap();
                    self.queue.cancel(p.timeout);
                    self.resolve(p, Outcome::Nack, Some(Packet::Nack(n.clone())));
                }
            }
        }
    }

    fn resolve(&mut self, p: Pending, outcome: Outcome, packet: Option<Packet>) {
        self.tallies.entry(self.label(p.node)).or_default().add(outcome);
        let actions = self.with_app(p.node, p.app, |a, ctx| match (&packet, outcome) {
            (Some(Packet::Data(d)), Outcome::Data) => a.on_data(ctx, &p.interest, d),
            (Some(Packet::Nack(n)), Outcome::Nack) => a.on_nack(ctx, &p.interest, n),
            _ => a.on_timeout(ctx, &p.interest),
        });
        self.apply_actions(p.node, p.app, actions);
    }
}
