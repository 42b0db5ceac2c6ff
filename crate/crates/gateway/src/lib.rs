//! Command-line runner and live session service for `viz-core`.

pub mod cli;
pub mod hub;
pub mod protocol;
pub mod server;
