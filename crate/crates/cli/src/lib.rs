//! Text format, JSON output and subcommands for the `arthurkit` binary.

pub mod commands;
pub mod text;

pub use commands::{run, CliError, Command, ObjectKind, OracleKind, Output};
pub use text::{parse, parse_stream, serialize, serialize_stream, ParseError, Statement, Workspace};
