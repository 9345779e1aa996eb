pub mod experiment;
pub mod generators;
pub mod render;
pub mod snapshot;
