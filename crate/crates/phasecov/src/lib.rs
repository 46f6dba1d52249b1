//! Reports, sweep tables and the command-line front end built on
//! [`phasecov_core`].

pub mod cli;
pub mod error;
pub mod format;
pub mod sweep;
pub mod verify;

pub use error::CliError;
