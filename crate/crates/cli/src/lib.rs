//! Batch front end for the squeezing model: spectra, delay scans, delay budgets and fits
//! driven by a single JSON config, emitting CSV, JSON and SVG.

pub mod commands;
pub mod config;
pub mod error;
pub mod svg;

pub use error::{CliError, Result};
