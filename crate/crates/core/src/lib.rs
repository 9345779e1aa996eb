pub mod boundary_comm;
pub mod competition;
pub mod grey_election;
pub mod harness;
pub mod lattice;
pub mod runtime;
pub mod topology;
pub mod tree_engine;
