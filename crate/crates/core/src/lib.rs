pub mod cli;
pub mod error;
pub mod generators;
pub mod homology;
pub mod linalg;
pub mod module;
pub mod orbit;
pub mod reflection;
pub mod suites;
pub mod tree;

pub use error::{Error, Result};
