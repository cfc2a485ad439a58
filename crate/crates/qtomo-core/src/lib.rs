//! Directional quantiles and halfspace depth for planar data.
//!
//! The crate turns a bivariate sample into nested convex summaries: project
//! the points onto a fan of unit directions, take a one-dimensional
//! quantile along each, and intersect the resulting halfplanes. The same
//! machinery computes halfspace depth, depth-deepest points, tail-model
//! overlays for extreme levels, and Gaussian reference contours.
//!
//! The crate is `no_std` (with `alloc`); everything that needs an operating
//! system lives in the companion `qtomo` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

mod error;
mod fmath;

pub mod depth;
pub mod envelope;
pub mod estimators;
pub mod geom;
pub mod normalfit;
pub mod quantile;

pub use error::{Error, Result};
