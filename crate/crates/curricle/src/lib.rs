//! Filesystem, configuration, and CLI layer of the curricle workbench.
//!
//! All numerical work lives in `curricle-core`; this crate wires data
//! files into it and persists reproducible run directories.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod fsio;
pub mod rundir;
