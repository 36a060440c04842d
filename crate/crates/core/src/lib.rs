//! Range closest-pair search: orthogonal, simplex, halfspace and ball
//! queries over static point sets in `R^d`.

pub mod error;
pub mod geometry;
pub mod hardness;
pub mod harness;
pub mod partition;
pub mod rcp;
pub mod reporting;

pub use error::{Error, Result};
