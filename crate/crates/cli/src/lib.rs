//! Command-line front end: flat configuration files, run orchestration and output records.

pub mod app;
pub mod commands;
pub mod config;
pub mod failure;
pub mod record;

pub use app::run;
pub use config::{config_roundtrip, parse_config, RunConfig};
pub use failure::{Failure, FailureKind};
