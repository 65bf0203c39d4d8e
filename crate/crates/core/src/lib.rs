//! Motion-compensated Haar lifting in time for slice sequences, with block,
//! triangle-mesh and quadrilateral-mesh compensation.

pub mod analysis;
pub mod cli;
pub mod compensation;
pub mod error;
pub mod estimation;
pub mod lifting;
pub mod mesh;
pub mod mvf;
pub mod rng;
pub mod volume;

pub use error::{Error, Result};
