pub mod calculus;
pub mod cli;
pub mod error;
pub mod model;
pub mod network;
pub mod solver;
pub mod valuation;

pub use error::{Error, Result};
