//! Command-line front end for breathing k-means: data generation and
//! ingestion, single fits, paired benchmark campaigns and SVG plots.

pub mod bench;
pub mod cli;
pub mod error;
pub mod format;
pub mod plot;
pub mod spec;

pub use error::{CliError, CliResult};
