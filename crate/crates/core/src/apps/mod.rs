//! Applications running on top of a node's forwarder.

mod beacon;
mod scripted;
mod tms;

use rand::RngCore;

pub use beacon::{BeaconApp, BeaconConfig, NeighborEntry, NeighborTable};
pub use scripted::{ScriptedApp, ScriptedInterest, ScriptedReply};
pub use tms::{
    plan_reroute, route_cost, TmsConfig, TmsConsumer, TmsProducer, TrafficPayload, TrafficView, ViewEntry,
};

use crate::mobility::{Mobility, VehicleView};
use crate::ndn::{Data, Interest, Nack};
use crate::time::SimTime;

/// How an expressed interest ended. Exactly one per tracked interest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Data,
    Nack,
    Timeout,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Data => "data",
            Outcome::Nack => "nack",
            Outcome::Timeout => "timeout",
        }
    }
}

/// Requests an application makes of its node and vehicle.
#[derive(Debug, Clone, PartialEq)]
pub enum AppAction {
    /// Send an interest through the app face. Untracked interests (beacons)
    /// get no outcome callback.
    Express { interest: Interest, tracked: bool },
    PutData(Data),
    SetLane(u32),
    SetRoute(Vec<String>),
    /// Arm a timer; `on_timer` receives `tag` after `delay`.
    Timer { delay: SimTime, tag: u64 },
}

/// What an application sees during a callback.
pub struct AppContext<'a> {
    pub now: SimTime,
    /// Vehicle id or static-node label.
    pub label: &'a str,
    pub vehicle: Option<&'a VehicleView>,
    pub mobility: &'a Mobility,
    pub rng: &'a mut dyn RngCore,
}

#[derive(Debug, Clone)]
pub enum App {
    Beacon(BeaconApp),
    TmsConsumer(TmsConsumer),
    TmsProducer(TmsProducer),
    Scripted(ScriptedApp),
}

impl App {
    pub fn kind_str(&self) -> &'static str {
        match self {
            App::Beacon(_) => "beacon",
            App::TmsConsumer(_) => "tms_consumer",
            App::TmsProducer(_) => "tms_producer",
            App::Scripted(_) => "scripted",
        }
    }

    pub fn start(&mut self, ctx: &mut AppContext) -> Vec<AppAction> {
        match self {
            App::Beacon(a) => a.start(ctx),
            App::TmsConsumer(a) => a.start(ctx),
            App::TmsProducer(_) => Vec::new(),
            App::Scripted(a) => a.start(ctx),
        }
    }

    pub fn on_timer(&mut self, ctx: &mut AppContext, tag: u64) -> Vec<AppAction> {
        match self {
            App::Beacon(a) => a.on_timer(ctx),
            App::TmsConsumer(a) => a.on_timer(ctx),
            App::TmsProducer(_) => Vec::new(),
            App::Scripted(a) => a.on_timer(ctx, tag),
        }
    }

    pub fn on_interest(&mut self, ctx: &mut AppContext, interest: &Interest) -> Vec<AppAction> {
        match self {
            App::Beacon(a) => a.on_beacon(ctx, interest),
            App::TmsConsumer(_) => Vec::new(),
            App::TmsProducer(a) => a.on_interest(ctx, interest),
            App::Scripted(a) => a.on_interest(ctx, interest),
        }
    }

    pub fn on_data(&mut self, ctx: &mut AppContext, interest: &Interest, data: &Data) -> Vec<AppAction> {
        match self {
            App::TmsConsumer(a) => a.on_data(ctx, interest, data),
            App::Scripted(a) => {
                a.record(ctx.now, interest, Outcome::Data);
                Vec::new()
            }
            _ => Vec::new(),
        }
    }

    pub fn on_nack(&mut self, ctx: &mut AppContext, interest: &Interest, _nack: &Nack) -> Vec<AppAction> {
        match self {
            App::TmsConsumer(a) => a.on_failure(interest),
            App::Scripted(a) => {
                a.record(ctx.now, interest, Outcome::Nack);
                Vec::new()
            }
            _ => Vec::new(),
        }
    }

    pub fn on_timeout(&mut self, ctx: &mut AppContext, interest: &Interest) -> Vec<AppAction> {
        match self {
            App::TmsConsumer(a) => a.on_failure(interest),
            App::Scripted(a) => {
                a.record(ctx.now, interest, Outcome::Timeout);
                Vec::new()
            }
            _ => Vec::new(),
        }
    }
}
