//! Table-producing drivers behind the `twistosc` binary.

pub mod commands;
pub mod config;
pub mod table;

pub use commands::{
    cmd_coherent, cmd_radial, cmd_spectrum, cmd_sweep, cmd_verify, radial_profile, write_output,
};
pub use config::{parse_times, OutputFormat, RunConfig};
pub use table::{Cell, Report, Table};
