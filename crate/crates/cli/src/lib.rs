//! Command-line driver for the entanglement-cooling experiments: configuration,
//! parallel ensembles, CSV/JSON outputs and plotting scripts.

pub mod cli;
pub mod config;
pub mod ensemble;
pub mod output;
pub mod plot;
pub mod presets;
pub mod progress;
