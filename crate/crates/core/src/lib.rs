//! Robust orientation planning for directional sensors on platforms that may
//! drift from their nominal positions.
//!
//! Each sensor sees an annular sector and is credited only for the part of
//! it inside its own Voronoi cell. [`robust`] measures how far a sensor may
//! drift before leaving its cell. [`orientation`] chooses a heading from the
//! cell vertices, scoring each candidate at a worst-case displaced location.
//!
//! ```
//! use std::f64::consts::PI;
//! use rrfcov::geometry::Point2;
//! use rrfcov::orientation::{run_integrated_algorithm, AlgoParams, Sensor};
//! use rrfcov::voronoi::Roi;
//!
//! let roi = Roi::square(1000.0).unwrap();
//! let sensor = Sensor::new(0, Point2::new(500.0, 500.0), 0.0, 100.0, 2.0 * PI).unwrap();
//! let solution = run_integrated_algorithm(&[sensor], roi, &AlgoParams::default()).unwrap();
//! assert!((solution.total_area - PI * 1e4).abs() < 1e-6);
//! ```
//!
//! The guide in `book/` walks through each module; its snippets run as
//! doctests of this crate.

pub mod error;
pub mod geometry;
pub mod harness;
pub mod oracle;
pub mod orientation;
pub mod robust;
pub mod voronoi;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/voronoi.md")]
    mod voronoi {}
    #[doc = include_str!("../../../book/src/rrf.md")]
    mod rrf {}
    #[doc = include_str!("../../../book/src/orientation.md")]
    mod orientation {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/validation.md")]
    mod validation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
