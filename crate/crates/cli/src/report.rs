//! Self-describing JSON envelope shared by every command.

use std::time::Duration;

use gss_core::ChannelParams;
use serde::Serialize;
use serde_json::Value;

/// What a command produced, before formatting.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub command: &'static str,
    pub params: Option<ChannelParams>,
    pub inputs: Value,
    pub results: Value,
    /// CSV rendering (including any `#` metadata lines).
    pub csv: String,
    /// False on verification FAIL or oracle MISMATCH.
    pub passed: bool,
    /// One-line human summary for stderr.
    pub summary: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Toolchain {
    pub name: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub parallel: bool,
    pub rust_version: &'static str,
}

impl Toolchain {
    pub fn current() -> Self {
        Toolchain {
            name: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            core_version: gss_core::VERSION,
            parallel: cfg!(feature = "parallel"),
            rust_version: env!("CARGO_PKG_RUST_VERSION"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport<'a> {
    pub command: &'static str,
    pub toolchain: Toolchain,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<ChannelParams>,
    pub inputs: &'a Value,
    pub results: &'a Value,
    pub wall_time_ms: u64,
}

impl<'a> RunReport<'a> {
    pub fn new(output: &'a CommandOutput, elapsed: Duration) -> Self {
        RunReport {
            command: output.command,
            toolchain: Toolchain::current(),
            params: output.params,
            inputs: &output.inputs,
            results: &output.results,
            wall_time_ms: elapsed.as_millis() as u64,
        }
    }
}
