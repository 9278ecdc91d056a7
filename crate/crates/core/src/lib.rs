//! Integration of surface-normal and gradient fields into depth maps.
//!
//! The crate provides raster types and finite-difference operators
//! ([`grid`]), camera models ([`camera`]), path-based integrators
//! ([`path`]), iterative least-squares solvers on arbitrary domains
//! ([`iterative`]), transform-based solvers on rectangles ([`spectral`]),
//! synthetic test data ([`synth`]), error metrics ([`metrics`]) and file
//! formats ([`io`]).

pub mod camera;
pub mod error;
pub mod grid;
pub mod io;
pub mod iterative;
pub mod metrics;
pub mod path;
pub mod spectral;
pub mod synth;

pub use camera::{normals_to_gradient, CameraModel, NormalField};
pub use error::{Error, FormatError, Result};
pub use grid::{DomainMask, GradientField, ScalarGrid};
