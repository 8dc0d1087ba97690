//! File formats, the command-line front end and the reproduction suite for
//! [`qaccess_core`].

pub mod cli;
pub mod csvio;
pub mod error;
pub mod formats;
pub mod library;
pub mod reproduce;

pub use error::{CliError, ExitKind};
