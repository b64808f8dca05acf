//! Jet-construction kernels on the bidisc and tridisc.

pub mod curvature;
pub mod error;
pub mod kernel;
pub mod matrix;
pub mod mobius;
pub mod normalize;
pub mod onb;
pub mod scalar;
pub mod series;
pub mod suite;
pub mod tridisc;

pub use error::{Error, Result};
