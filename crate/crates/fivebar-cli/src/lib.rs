//! Command-line front end for the `fivebar` crate: config file parsing,
//! report serialization (JSON/CSV), SVG plotting, and the subcommand
//! implementations behind the `fivebar` binary.

pub mod commands;
pub mod config;
pub mod report;
pub mod svg;

pub use commands::{cmd_atlas, cmd_fk, cmd_ik, cmd_modes, CmdError};
pub use config::{parse_config, ConfigError, Formats, RunConfig};
pub use report::JsonReport;

/// Exit codes of the binary.
pub mod exit_codes {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    /// Kinematic infeasibility: unreachable target, ill-defined mode,
    /// no assembly, singular solve.
    pub const KINEMATIC: i32 = 2;
    pub const IO: i32 = 3;
}
