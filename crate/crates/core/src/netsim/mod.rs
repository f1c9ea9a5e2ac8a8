//! Event engine, broadcast radio medium and node pool.

mod medium;
mod pool;
mod queue;

pub use medium::{CollisionMode, Delivery, Medium, MediumError, Position, RadioConfig, Station};
pub use pool::{NodePool, PoolError, PoolNode};
pub use queue::{EventId, EventQueue};
