pub mod check;
pub mod closing;
pub mod curvegen;
pub mod elastica;
pub mod error;
pub mod geometry;
pub mod poly;
pub mod weierstrass;

pub use error::{Error, Result};
