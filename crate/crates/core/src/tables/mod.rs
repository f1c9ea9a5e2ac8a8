//! Per-node forwarding state: Content Store, Pending Interest Table,
//! Forwarding Information Base, and faces.

mod cs;
mod face;
mod fib;
mod pit;

pub use cs::{ContentStore, CsEntry};
pub use face::{Face, FaceId, FaceKind};
pub use fib::{Fib, FibEntry};
pub use pit::{InRecord, OutRecord, Pit, PitEntry, PitInsert};
