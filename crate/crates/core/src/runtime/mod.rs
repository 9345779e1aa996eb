//! Simulation substrate: particle registers, messages, schedulers and the
//! observer that detects quiescence.

pub mod context;
pub mod message;
pub mod schedule;
pub mod state;
pub mod world;

pub use context::{Event, Stage};
pub use message::{Channel, Envelope, Message};
pub use schedule::{ModeError, ScheduleMode, Scheduler};
pub use state::{ParticleState, Phase, Role};
pub use world::{Metrics, RunOptions, RuntimeError, World};
