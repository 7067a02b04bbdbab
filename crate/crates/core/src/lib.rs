//! Detector-agnostic engine for reliability-scored pseudo-label pipelines
//! in sonar object detection.
//!
//! The crate is `no_std` + `alloc`: everything here is pure box algebra,
//! score calibration and loss arithmetic over in-memory rasters. File
//! formats, PNG io and the command line live in the companion `rsod-cli`
//! crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod error;
pub mod eval;
pub mod geometry;
pub mod losses;
pub mod math;
pub mod ompl;
pub mod raster;
pub mod reliability;
pub mod synthetic;
pub mod teacher;
pub mod view;

pub use error::CoreError;
pub use geometry::{BBox, CornerMatrix};
pub use raster::Raster;
pub use view::ViewTransform;
