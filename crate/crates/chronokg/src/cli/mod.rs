//! Command-line orchestration: config file, run manifests, atomic output
//! writing, and one runner per subcommand.

mod commands;
mod config;
mod manifest;
mod plot;

pub use commands::{execute, Cli, Command, RunSummary};
pub use config::{AppConfig, PathsConfig, ProvidersConfig, SourcesConfig};
pub use manifest::{write_atomic, write_jsonl_atomic, RunManifest};

use crate::error::Error;

/// Exit code mapping: 0 success, 1 domain failure, 2 usage/config error.
pub fn exit_code_for(error: &Error) -> i32 {
    match error {
        Error::Config(_) => 2,
        _ => 1,
    }
}
