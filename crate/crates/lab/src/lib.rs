//! Configuration, file formats and command dispatch for the `smlab`
//! laboratory built on [`semimarkov`].
//!
//! Every command is a pure function of the effective configuration and
//! returns its artifacts in memory ([`commands::Outcome`]); only the binary
//! touches the file system. Replications run on a rayon pool
//! ([`runner::RayonRunner`]) whose size never changes the output.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod runner;

pub use commands::{run_command, Command, Outcome};
pub use config::{parse_config, RunConfig};
pub use error::LabError;
