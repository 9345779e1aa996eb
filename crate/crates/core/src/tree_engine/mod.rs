//! Spanning trees, neighbourhood labels, the Euler ring and label forwarding.

pub mod build;
pub mod label;
pub mod lfc;
pub mod ring;

pub use label::{NeighborLabel, Symbol};
pub use lfc::{LfcCell, LfcItem, RingSchedule, RingSim};
pub use ring::{euler_ring, AgentRef, AgentSlot, EulerRing, RingAgent, RingPosition, Tree};
