//! Component competitions: edge selection, stream comparison, merging.

pub mod compare;
pub mod round;

pub use compare::{judge, oracle_compare, Endpoint, Outcome, PairSim, PartnerMsg};
