//! Per-node NDN forwarding: the incoming interest/data/nack pipelines, the
//! two forwarding strategies, localhop scope control, and packet tracing.

mod node;
mod strategy;
mod trace;


pub use node::{Counters, Effects, Emission, ForwarderConfig, ForwarderError, ForwarderNode};
pub use strategy::{violates_scope, Strategy};
pub use trace::{Direction, TraceLine, TraceRecord, Verdict};
