//! Fourier analysis of the simple random walk on the Heisenberg group `H(n)`.

pub mod cli;
pub mod dirichlet;
pub mod error;
pub mod group;
pub mod harper;
pub mod linalg;
pub mod mixing;
pub mod repr;
pub mod sim;

pub use error::{Error, Result};
