//! Command-line front end for `hvforge-core`: measurement spec and model
//! files, ASCII tables and the `hvforge` subcommands.
//!
//! Exit codes: 0 success, 1 statistical flag or failed verification, 2 bad
//! input, 3 geometry error, 4 rotation is not a symmetry, 5 state not
//! representable by the model.

pub mod cli;
pub mod error;
pub mod formats;
pub mod table;

pub use cli::{run, Cli, Format, Report};
pub use error::{exit, CliError, CliResult};
