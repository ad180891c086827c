//! Command-line front end: JSON configs in, CSV or JSON reports out.

pub mod config;
pub mod error;
pub mod report;

pub use config::{Config, Output, SweepSpec};
pub use error::CliError;
pub use report::{Cell, Table};
