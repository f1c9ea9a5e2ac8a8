//! Discrete-event simulator for named-data networking over vehicular
//! ad-hoc networks.

pub mod apps;
pub mod experiment;
pub mod forwarder;
pub mod mobility;
pub mod ndn;
pub mod netsim;
pub mod sim;
pub mod tables;
pub mod time;

pub use time::SimTime;
