//! Experiment runner and property verifier behind the `si2e` binary.
//!
//! - [`config`]: `key = value` experiment files and command-line overrides.
//! - [`experiment`]: multi-seed training, CSV / JSON / SVG outputs.
//! - [`summary`]: episodes-to-threshold statistics.
//! - [`plot`]: SVG learning curves.
//! - [`verify`]: the seeded property suite.

pub mod config;
pub mod error;
pub mod experiment;
pub mod plot;
pub mod summary;
pub mod verify;

pub use config::ExperimentConfig;
pub use error::{Error, Result};
pub use summary::Summary;
