//! A deliberately naive second implementation of the forwarding rules and
//! the radio timing. Every table is a flat list searched linearly and the
//! event list is scanned for its minimum on every step. Used to cross-check
//! the event-driven simulator packet trace line by line on small topologies.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use vndn::apps::{ScriptedApp, ScriptedInterest, ScriptedReply};
use vndn::forwarder::{ForwarderConfig, Strategy};
use vndn::mobility::Mobility;
use vndn::ndn::{encode_packet, Data, Interest, Nack, NackReason, Name, Packet};
use vndn::netsim::{Position, RadioConfig};
use vndn::sim::{rng_stream, AppSpec, NodeRole, SimConfig, Simulation, StaticNode, STREAM_NETWORK};
use vndn::SimTime;

#[derive(Debug, Clone)]
pub struct RefInterest {
    pub at_us: u64,
    pub name: Name,
    pub nonce: u32,
    pub lifetime_ms: u32,
}

#[derive(Debug, Clone)]
pub struct RefNode {
    pub x: f64,
    pub y: f64,
    pub vehicle: bool,
    pub routes: Vec<Name>,
    pub schedule: Vec<RefInterest>,
    /// Prefix answered by the node's app, with the Data freshness.
    pub reply: Option<(Name, u32)>,
}

#[derive(Debug, Clone)]
pub struct RefScenario {
    pub strategy: Strategy,
    pub jitter_us: u64,
    pub backoff_us: u64,
    pub cs_capacity: usize,
    pub dead_ttl_us: u64,
    pub range_m: f64,
    pub duration_ms: u64,
    pub seed: u64,
    pub nodes: Vec<RefNode>,
}

const PAYLOAD: &[u8] = b"v";

impl RefScenario {
    pub fn has_app(n: &RefNode) -> bool {
        !n.schedule.is_empty() || n.reply.is_some()
    }

    /// The same scenario wired into the real simulator.
    pub fn build_sim(&self) -> Simulation {
        let radio = RadioConfig {
            range_m: self.range_m,
            mac_backoff_ms: self.backoff_us as f64 / 1000.0,
            ..RadioConfig::default()
        };
        let cfg = SimConfig {
            forwarder: ForwarderConfig {
                strategy: self.strategy,
                cs_capacity: self.cs_capacity,
                vanet_jitter_max: SimTime::from_micros(self.jitter_us),
                dead_nonce_ttl: SimTime::from_micros(self.dead_ttl_us),
            },
            radio,
            duration: SimTime::from_millis(self.duration_ms),
            // no mobility ticks inside the run
            tick: SimTime::from_secs(3600),
            trace: true,
            seed: self.seed,
            ..SimConfig::default()
        };
        let statics = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let role = if n.vehicle { NodeRole::Vehicle } else { NodeRole::Rsu };
                let mut s = StaticNode::new(&format!("n{i}"), Position::new(n.x, n.y), role);
                s.routes = n.routes.clone();
                if Self::has_app(n) {
                    let schedule = n
                        .schedule
                        .iter()
                        .map(|r| ScriptedInterest {
                            at: SimTime::from_micros(r.at_us),
                            name: r.name.clone(),
                            nonce: Some(r.nonce),
                            lifetime_ms: r.lifetime_ms,
                            can_be_prefix: false,
                        })
                        .collect();
                    let replies = n
                        .reply
                        .iter()
                        .map(|(p, f)| ScriptedReply {
                            prefix: p.clone(),
                            payload: PAYLOAD.to_vec(),
                            freshness_ms: *f,
                        })
                        .collect();
                    s = s.with_app(AppSpec::Scripted(ScriptedApp::new(schedule, replies)));
                }
                s
            })
            .collect();
        Simulation::new(cfg, Mobility::stationary(SimTime::from_secs(3600)), statics).expect("scenario builds")
    }

    pub fn sim_trace(&self) -> Vec<String> {
        let mut sim = self.build_sim();
        sim.run().expect("run");
        sim.take_trace()
    }
}

// face 0 is the radio, face 1 the node's single app
const AIR: u32 = 0;
const APP: u32 = 1;

#[derive(Debug, Clone)]
struct CsRow {
    data: Data,
    arrival: u64,
    last_used: u64,
}

#[derive(Debug, Clone)]
struct PitRow {
    name: Name,
    ins: Vec<(u32, u32, u64)>,
    outs: Vec<(u32, u32)>,
    expiry: u64,
}

#[derive(Debug, Clone)]
struct NodeState {
    x: f64,
    y: f64,
    fib: Vec<(Name, Vec<u32>)>,
    cs: Vec<CsRow>,
    pit: Vec<PitRow>,
    dead: Vec<(Name, u32, u64)>,
    queued: Vec<(u64, Packet)>,
    next_token: u64,
    has_app: bool,
    schedule: Vec<RefInterest>,
    reply: Option<(Name, u32)>,
}

#[derive(Debug, Clone)]
enum Ev {
    Timer(usize, usize),
    Transmit(usize, u64),
    Frame(usize, Packet),
    Deliver(usize, u32, Packet),
    PitSweep(usize),
}

enum Out {
    Air(u64, u64),
    App(u32, Packet),
    Sweep(u64),
}

pub struct Reference {
    sc: RefScenario,
    nodes: Vec<NodeState>,
    events: Vec<(u64, u64, Ev)>,
    seq: u64,
    now: u64,
    rng: ChaCha8Rng,
    lines: Vec<String>,
}

fn ms_text(us: u64) -> String {
    format!("{}.{:03}", us / 1000, us % 1000)
}

fn kind_text(p: &Packet) -> &'static str {
    match p {
        Packet::Interest(_) => "interest",
        Packet::Data(_) => "data",
        Packet::Nack(_) => "nack",
    }
}

fn nonce_text(p: &Packet) -> String {
    match p {
        Packet::Interest(i) => i.nonce.to_string(),
        Packet::Nack(n) => n.nonce.to_string(),
        Packet::Data(_) => "-".into(),
    }
}

fn is_prefix(p: &Name, n: &Name) -> bool {
    p.len() <= n.len() && p.components().iter().zip(n.components()).all(|(a, b)| a == b)
}

fn localhop(n: &Name) -> bool {
    n.component_str(0) == Some("localhop")
}

impl Reference {
    pub fn new(sc: &RefScenario) -> Self {
        let nodes = sc
            .nodes
            .iter()
            .map(|n| {
                let mut fib: Vec<(Name, Vec<u32>)> = Vec::new();
                let mut add = |p: Name, f: u32| match fib.iter_mut().find(|(q, _)| *q == p) {
                    Some((_, hops)) => {
                        if !hops.contains(&f) {
                            hops.push(f);
                            hops.sort();
                        }
                    }
                    None => fib.push((p, vec![f])),
                };
                if n.vehicle {
                    add(Name::parse_uri("/service").unwrap(), AIR);
                }
                for r in &n.routes {
                    add(r.clone(), AIR);
                }
                if let Some((p, _)) = &n.reply {
                    add(p.clone(), APP);
                }
                NodeState {
                    x: n.x,
                    y: n.y,
                    fib,
                    cs: Vec::new(),
                    pit: Vec::new(),
                    dead: Vec::new(),
                    queued: Vec::new(),
                    next_token: 0,
                    has_app: RefScenario::has_app(n),
                    schedule: n.schedule.clone(),
                    reply: n.reply.clone(),
                }
            })
            .collect();
        Self {
            sc: sc.clone(),
            nodes,
            events: Vec::new(),
            seq: 0,
            now: 0,
            rng: rng_stream(sc.seed, STREAM_NETWORK),
            lines: Vec::new(),
        }
    }

    fn at(&mut self, t: u64, ev: Ev) {
        self.events.push((t, self.seq, ev));
        self.seq += 1;
    }

    fn line(&mut self, node: usize, face: u32, dir: &str, p: &Packet, verdict: &str) {
        let face = if face == AIR { "wireless" } else { "app" };
        self.lines.push(format!(
            "{} {} {} {} {} {} {} {}",
            ms_text(self.now),
            node,
            face,
            dir,
            kind_text(p),
            p.name().to_uri(),
            nonce_text(p),
            verdict
        ));
    }

    pub fn run(mut self) -> Vec<String> {
        for n in 0..self.nodes.len() {
            for k in 0..self.nodes[n].schedule.len() {
                let t = self.nodes[n].schedule[k].at_us;
                self.at(t, Ev::Timer(n, k));
            }
        }
        let end = self.sc.duration_ms * 1000;
        loop {
            let mut best: Option<usize> = None;
            for (i, e) in self.events.iter().enumerate() {
                if best.is_none_or(|b| (e.0, e.1) < (self.events[b].0, self.events[b].1)) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            if self.events[b].0 > end {
                break;
            }
            let (t, _, ev) = self.events.remove(b);
            self.now = t;
            self.handle(ev);
        }
        self.lines
    }

    fn handle(&mut self, ev: Ev) {
        match ev {
            Ev::Timer(n, k) => {
                let r = self.nodes[n].schedule[k].clone();
                let i = Interest::new(r.name, r.nonce).with_lifetime(r.lifetime_ms);
                let outs = self.interest(n, APP, i);
                self.apply(n, outs);
            }
            Ev::Transmit(n, token) => self.transmit(n, token),
            Ev::Frame(to, p) => {
                let outs = match p {
                    Packet::Interest(mut i) => {
                        i.hop_count = i.hop_count.saturating_add(1);
                        self.interest(to, AIR, i)
                    }
                    Packet::Data(d) => self.data(to, AIR, d),
                    Packet::Nack(k) => self.nack(to, AIR, k),
                };
                self.apply(to, outs);
            }
            Ev::Deliver(n, face, p) => {
                if face != APP || !self.nodes[n].has_app {
                    return;
                }
                if let Packet::Interest(i) = p {
                    let reply = self.nodes[n].reply.clone();
                    if let Some((prefix, fresh)) = reply.filter(|(pre, _)| is_prefix(pre, &i.name)) {
                        let _ = prefix;
                        let d = Data::new(i.name.clone(), PAYLOAD.to_vec(), fresh);
                        let outs = self.data(n, APP, d);
                        self.apply(n, outs);
                    }
                }
            }
            Ev::PitSweep(n) => {
                let now = self.now;
                self.nodes[n].pit.retain(|r| r.expiry > now);
            }
        }
    }

    /// Turns a handler's outputs into events, drawing the channel-access
    /// delay for each radio send in order.
    fn apply(&mut self, n: usize, outs: Vec<Out>) {
        for o in outs {
            match o {
                Out::Air(token, delay) => {
                    let backoff = if self.sc.backoff_us > 0 {
                        self.rng.random_range(0..=self.sc.backoff_us)
                    } else {
                        0
                    };
                    let t = self.now + delay + backoff;
                    self.at(t, Ev::Transmit(n, token));
                }
                Out::App(face, p) => {
                    let t = self.now;
                    self.at(t, Ev::Deliver(n, face, p));
                }
                Out::Sweep(t) => self.at(t, Ev::PitSweep(n)),
            }
        }
    }

    fn transmit(&mut self, n: usize, token: u64) {
        let Some(pos) = self.nodes[n].queued.iter().position(|(t, _)| *t == token) else {
            return;
        };
        let (_, p) = self.nodes[n].queued.remove(pos);
        self.line(n, AIR, "out", &p, "sent");
        let bytes = encode_packet(&p).len();
        let ms = bytes as f64 * 8.0 / RadioConfig::default().data_rate_bps * 1000.0 + RadioConfig::default().overhead_ms;
        let air = SimTime::from_millis_f64(ms).as_micros();
        let (x, y) = (self.nodes[n].x, self.nodes[n].y);
        for to in 0..self.nodes.len() {
            if to != n && (self.nodes[to].x - x).hypot(self.nodes[to].y - y) <= self.sc.range_m {
                let t = self.now + air;
                self.at(t, Ev::Frame(to, p.clone()));
            }
        }
    }

    fn send(&mut self, n: usize, face: u32, p: Packet, outs: &mut Vec<Out>) {
        if face == AIR {
            let delay = if self.sc.strategy == Strategy::MulticastVanet && self.sc.jitter_us > 0 {
                self.rng.random_range(0..=self.sc.jitter_us)
            } else {
                0
            };
            let node = &mut self.nodes[n];
            let token = node.next_token;
            node.next_token += 1;
            node.queued.push((token, p));
            outs.push(Out::Air(token, delay));
        } else {
            self.line(n, face, "out", &p, "delivered");
            outs.push(Out::App(face, p));
        }
    }

    fn lpm(&self, n: usize, name: &Name) -> Option<Vec<u32>> {
        self.nodes[n]
            .fib
            .iter()
            .filter(|(p, _)| is_prefix(p, name))
            .max_by_key(|(p, _)| p.len())
            .map(|(_, hops)| hops.clone())
    }

    fn forget_old_nonces(&mut self, n: usize) {
        let now = self.now;
        self.nodes[n].dead.retain(|d| d.2 > now);
    }

    fn remember_nonce(&mut self, n: usize, name: &Name, nonce: u32) {
        if self.sc.dead_ttl_us == 0 {
            return;
        }
        let until = self.now + self.sc.dead_ttl_us;
        let node = &mut self.nodes[n];
        if !node.dead.iter().any(|d| d.0 == *name && d.1 == nonce) {
            node.dead.push((name.clone(), nonce, until));
        }
    }

    fn cancel(&mut self, n: usize, pred: impl Fn(&Packet) -> bool) -> usize {
        let q = &mut self.nodes[n].queued;
        let before = q.len();
        q.retain(|(_, p)| !pred(p));
        before - q.len()
    }

    fn interest(&mut self, n: usize, face: u32, i: Interest) -> Vec<Out> {
        let mut outs = Vec::new();
        let p = Packet::Interest(i.clone());
        let vanet = self.sc.strategy == Strategy::MulticastVanet;

        if face == AIR && localhop(&i.name) {
            let to_app = self.lpm(n, &i.name).is_some_and(|hops| hops.iter().any(|&h| h != AIR));
            if !to_app {
                self.line(n, face, "in", &p, "scope");
                return outs;
            }
        }

        self.forget_old_nonces(n);
        if self.nodes[n].dead.iter().any(|d| d.0 == i.name && d.1 == i.nonce) {
            self.line(n, face, "in", &p, "duplicate");
            return outs;
        }

        let now = self.now;
        let stale = |r: &CsRow| now.saturating_sub(r.arrival) > u64::from(r.data.freshness_ms) * 1000;
        if let Some(k) = self.nodes[n].cs.iter().position(|r| r.data.name == i.name) {
            if stale(&self.nodes[n].cs[k]) {
                self.nodes[n].cs.remove(k);
            } else {
                let row = &mut self.nodes[n].cs[k];
                row.last_used = now.max(row.arrival);
                let d = row.data.clone();
                self.remember_nonce(n, &i.name, i.nonce);
                self.line(n, face, "in", &p, "cs_hit");
                self.send(n, face, Packet::Data(d), &mut outs);
                return outs;
            }
        }

        let expiry = now + u64::from(i.lifetime_ms) * 1000;
        self.nodes[n].pit.retain(|r| !(r.name == i.name && r.expiry <= now));
        let existing = self.nodes[n].pit.iter().position(|r| r.name == i.name);
        match existing {
            Some(k) => {
                let row = &self.nodes[n].pit[k];
                let seen = row.ins.iter().any(|r| r.1 == i.nonce) || row.outs.iter().any(|r| r.1 == i.nonce);
                if seen {
                    self.line(n, face, "in", &p, "duplicate");
                    if vanet && face == AIR {
                        let gone = self.cancel(n, |q| matches!(q, Packet::Interest(x) if x.name == i.name && x.nonce == i.nonce));
                        if gone > 0 {
                            self.nodes[n].pit[k].outs.retain(|o| o.0 != AIR);
                        }
                    }
                } else {
                    let row = &mut self.nodes[n].pit[k];
                    row.ins.retain(|r| r.0 != face);
                    row.ins.push((face, i.nonce, expiry));
                    row.expiry = row.ins.iter().map(|r| r.2).max().unwrap();
                    let e = row.expiry;
                    self.line(n, face, "in", &p, "aggregated");
                    outs.push(Out::Sweep(e));
                }
            }
            None => {
                self.nodes[n].pit.push(PitRow {
                    name: i.name.clone(),
                    ins: vec![(face, i.nonce, expiry)],
                    outs: Vec::new(),
                    expiry,
                });
                outs.push(Out::Sweep(expiry));
                let mut targets: Vec<u32> = self
                    .lpm(n, &i.name)
                    .unwrap_or_default()
                    .into_iter()
                    .filter(|&h| h != face)
                    .filter(|&h| !(localhop(&i.name) && face == AIR && h == AIR))
                    .collect();
                if vanet {
                    if !localhop(&i.name) && !targets.contains(&AIR) {
                        targets.push(AIR);
                        targets.sort();
                    }
                } else if targets.is_empty() {
                    self.line(n, face, "in", &p, "no_route");
                    self.nodes[n].pit.retain(|r| r.name != i.name);
                    let k = Nack::for_interest(&i, NackReason::NoRoute);
                    self.send(n, face, Packet::Nack(k), &mut outs);
                    return outs;
                }
                self.line(n, face, "in", &p, "forwarded");
                for t in targets {
                    let row = self.nodes[n].pit.iter_mut().find(|r| r.name == i.name).unwrap();
                    row.outs.retain(|o| o.0 != t);
                    row.outs.push((t, i.nonce));
                    self.send(n, t, Packet::Interest(i.clone()), &mut outs);
                }
            }
        }
        outs
    }

    fn data(&mut self, n: usize, face: u32, d: Data) -> Vec<Out> {
        let mut outs = Vec::new();
        let p = Packet::Data(d.clone());
        let vanet = self.sc.strategy == Strategy::MulticastVanet;
        if face == AIR && vanet {
            self.cancel(n, |q| matches!(q, Packet::Data(x) if x.name == d.name));
        }
        let now = self.now;
        // expired entries on the data's prefixes are dropped as they are met
        self.nodes[n].pit.retain(|r| !(is_prefix(&r.name, &d.name) && r.expiry <= now));
        let mut matched: Vec<PitRow> = Vec::new();
        let mut k = 0;
        while k < self.nodes[n].pit.len() {
            if self.nodes[n].pit[k].name == d.name {
                matched.push(self.nodes[n].pit.remove(k));
            } else {
                k += 1;
            }
        }
        if matched.is_empty() {
            self.line(n, face, "in", &p, "unsolicited");
            return outs;
        }
        self.forget_old_nonces(n);
        for row in &matched {
            let nonces: Vec<u32> = row.ins.iter().map(|r| r.1).chain(row.outs.iter().map(|r| r.1)).collect();
            for x in nonces {
                self.remember_nonce(n, &row.name, x);
            }
        }
        self.line(n, face, "in", &p, "satisfied");
        self.cache(n, d.clone());
        if vanet {
            self.cancel(n, |q| matches!(q, Packet::Interest(x) if matched.iter().any(|m| m.name == x.name)));
        }
        let relayed = matched.iter().any(|m| m.outs.iter().any(|o| o.0 == AIR));
        let mut faces: Vec<u32> = matched.iter().flat_map(|m| m.ins.iter().map(|r| r.0)).collect();
        faces.sort();
        faces.dedup();
        for f in faces {
            let back_on_air = vanet && relayed && f == face && face == AIR;
            if f == face && !back_on_air {
                continue;
            }
            self.send(n, f, p.clone(), &mut outs);
        }
        outs
    }

    fn cache(&mut self, n: usize, d: Data) {
        let cap = self.sc.cs_capacity;
        if cap == 0 {
            return;
        }
        let now = self.now;
        let cs = &mut self.nodes[n].cs;
        cs.retain(|r| r.data.name != d.name);
        if cs.len() >= cap {
            let victim = (0..cs.len())
                .min_by(|&a, &b| {
                    (cs[a].last_used, cs[a].arrival, &cs[a].data.name).cmp(&(cs[b].last_used, cs[b].arrival, &cs[b].data.name))
                })
                .unwrap();
            cs.remove(victim);
        }
        cs.push(CsRow {
            data: d,
            arrival: now,
            last_used: now,
        });
    }

    fn nack(&mut self, n: usize, face: u32, k: Nack) -> Vec<Out> {
        let mut outs = Vec::new();
        let p = Packet::Nack(k.clone());
        let Some(idx) = self.nodes[n].pit.iter().position(|r| r.name == k.name) else {
            self.line(n, face, "in", &p, "nack_dropped");
            return outs;
        };
        if self.sc.strategy == Strategy::MulticastVanet {
            self.line(n, face, "in", &p, "nack_absorbed");
            return outs;
        }
        if !self.nodes[n].pit[idx].outs.iter().any(|o| o.0 == face && o.1 == k.nonce) {
            self.line(n, face, "in", &p, "nack_dropped");
            return outs;
        }
        let row = self.nodes[n].pit.remove(idx);
        self.line(n, face, "in", &p, "nack_consumed");
        for r in row.ins.iter().filter(|r| r.0 != face) {
            let back = Nack {
                reason: k.reason,
                name: k.name.clone(),
                nonce: r.1,
            };
            self.send(n, r.0, Packet::Nack(back), &mut outs);
        }
        outs
    }
}

/// Every connectivity graph on two to four nodes, up to isomorphism, as a
/// layout for a 70 m radio range, with its edge count.
pub fn topologies() -> Vec<(&'static str, usize, Vec<(f64, f64)>)> {
    let tri = [(0.0, 0.0), (60.0, 0.0), (30.0, 50.0)];
    vec![
        ("2-apart", 0, vec![(0.0, 0.0), (100.0, 0.0)]),
        ("2-linked", 1, vec![(0.0, 0.0), (60.0, 0.0)]),
        ("3-empty", 0, vec![(0.0, 0.0), (200.0, 0.0), (400.0, 0.0)]),
        ("3-edge", 1, vec![(0.0, 0.0), (60.0, 0.0), (300.0, 0.0)]),
        ("3-path", 2, vec![(0.0, 0.0), (60.0, 0.0), (120.0, 0.0)]),
        ("3-triangle", 3, tri.to_vec()),
        ("4-empty", 0, vec![(0.0, 0.0), (200.0, 0.0), (400.0, 0.0), (600.0, 0.0)]),
        ("4-edge", 1, vec![(0.0, 0.0), (60.0, 0.0), (300.0, 0.0), (500.0, 0.0)]),
        ("4-two-edges", 2, vec![(0.0, 0.0), (60.0, 0.0), (300.0, 0.0), (360.0, 0.0)]),
        ("4-path3", 2, vec![(0.0, 0.0), (60.0, 0.0), (120.0, 0.0), (400.0, 0.0)]),
        ("4-triangle", 3, vec![tri[0], tri[1], tri[2], (400.0, 0.0)]),
        ("4-star", 3, vec![(0.0, 0.0), (60.0, 0.0), (-60.0, 0.0), (0.0, 60.0)]),
        ("4-path", 3, vec![(0.0, 0.0), (60.0, 0.0), (120.0, 0.0), (180.0, 0.0)]),
        ("4-cycle", 4, vec![(0.0, 0.0), (60.0, 0.0), (60.0, 60.0), (0.0, 60.0)]),
        ("4-paw", 4, vec![tri[0], tri[1], tri[2], (120.0, 0.0)]),
        ("4-diamond", 5, vec![tri[0], tri[1], tri[2], (30.0, -50.0)]),
        ("4-complete", 6, vec![(0.0, 0.0), (40.0, 0.0), (0.0, 40.0), (40.0, 40.0)]),
    ]
}

/// Random roles and up to six scripted interests over a handful of names
/// and nonces, on a fixed layout.
pub fn random_scenario_on(rng: &mut impl Rng, layout: &[(f64, f64)], strategy: Strategy) -> RefScenario {
    let names = ["/service/a/1", "/service/a/2", "/service/b/1", "/p/1", "/localhop/x/1"];
    let prefixes = ["/service/a", "/p", "/localhop/x"];
    let n_nodes = layout.len();
    let mut nodes: Vec<RefNode> = layout
        .iter()
        .map(|&(x, y)| RefNode {
            x,
            y,
            vehicle: rng.random_bool(0.7),
            routes: if rng.random_bool(0.3) {
                vec![Name::parse_uri("/p").unwrap()]
            } else {
                Vec::new()
            },
            schedule: Vec::new(),
            reply: rng.random_bool(0.4).then(|| {
                let p = prefixes[rng.random_range(0..prefixes.len())];
                (Name::parse_uri(p).unwrap(), [5u32, 1000][rng.random_range(0..2)])
            }),
        })
        .collect();
    let n_interests = rng.random_range(1..=6);
    for _ in 0..n_interests {
        let at_us = rng.random_range(0..40u64) * 2500 + rng.random_range(0..3u64);
        let k = rng.random_range(0..n_nodes);
        nodes[k].schedule.push(RefInterest {
            at_us,
            name: Name::parse_uri(names[rng.random_range(0..names.len())]).unwrap(),
            nonce: rng.random_range(1..=3),
            lifetime_ms: [20u32, 100, 2000][rng.random_range(0..3)],
        });
    }
    let dead_ttl_us = [0u64, 100_000][rng.random_range(0..2)];
    RefScenario {
        strategy,
        jitter_us: [0u64, 10_000][rng.random_range(0..2)],
        backoff_us: [0u64, 2_000][rng.random_range(0..2)],
        cs_capacity: [0usize, 1, 10][rng.random_range(0..3)],
        dead_ttl_us,
        range_m: 70.0,
        // without nonce memory a satisfied interest can bounce forever
        duration_ms: if dead_ttl_us == 0 { 400 } else { 3000 },
        seed: rng.random(),
        nodes,
    }
}

/// Random small scenario: two to four nodes on a line.
pub fn random_scenario(rng: &mut impl Rng) -> RefScenario {
    let n_nodes = rng.random_range(2..=4);
    let layout: Vec<(f64, f64)> = (0..n_nodes)
        .map(|_| (f64::from(rng.random_range(0..=6u32)) * 30.0, 0.0))
        .collect();
    let strategy = if rng.random_bool(0.5) {
        Strategy::Multicast
    } else {
        Strategy::MulticastVanet
    };
    random_scenario_on(rng, &layout, strategy)
}

fn check(case: &str, sc: &RefScenario) -> Result<usize, String> {
    let got = sc.sim_trace();
    let want = Reference::new(sc).run();
    if got != want {
        let at = got.iter().zip(&want).position(|(a, b)| a != b).unwrap_or(got.len().min(want.len()));
        return Err(format!(
            "{case}: traces differ at line {at}\nsim: {:?}\nref: {:?}\nscenario: {sc:?}",
            got.get(at),
            want.get(at)
        ));
    }
    Ok(got.len())
}

/// Runs every enumerated topology under both strategies with
/// `per_topology` random traffic patterns each.
pub fn compare_enumerated(per_topology: usize, seed: u64) -> Result<usize, String> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines = 0;
    for (label, _, layout) in topologies() {
        for strategy in [Strategy::Multicast, Strategy::MulticastVanet] {
            for k in 0..per_topology {
                let sc = random_scenario_on(&mut rng, &layout, strategy);
                lines += check(&format!("{label} {strategy} #{k}"), &sc)?;
            }
        }
    }
    Ok(lines)
}

/// Runs `cases` random scenarios through both implementations and returns
/// the number of trace lines compared, or the first disagreement.
pub fn compare(cases: usize, seed: u64) -> Result<usize, String> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines = 0;
    for case in 0..cases {
        lines += check(&format!("case {case}"), &random_scenario(&mut rng))?;
    }
    Ok(lines)
}
