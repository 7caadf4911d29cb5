//! Bloch-sphere encoding of the travelling salesman problem, with a
//! classical traversal solver and a superposition protocol tuned by SPSA.

pub mod brute;
pub mod encoding;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod matrix_io;
pub mod noise;
pub mod optimizer;
pub mod qubit;
pub mod superposition;
pub mod tsp;

pub use error::{Error, Result};
