pub mod data;
pub mod error;
pub mod eval;
pub mod forest;
pub mod model_io;
pub mod rng;
pub mod split;
pub mod tree;

pub use error::{Error, Result};
