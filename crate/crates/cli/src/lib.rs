//! Std companion to the core engine: dataset and record io, raster file
//! formats, harness configuration and the command implementations behind
//! the `rsod` binary.

pub mod commands;
pub mod config;
pub mod dataset;
pub mod pngio;
pub mod records;
pub mod subprocess;
