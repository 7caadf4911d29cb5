//! Experiment harness and command-line front end for the Bloch-sphere TSP
//! solvers: single-instance commands, seeded benchmarks and noise studies.

pub mod benchmark;
pub mod cli;
pub mod commands;
pub mod error;
pub mod io;
pub mod noise_study;
pub mod timing;

pub use bloch_tsp_core::optimizer::Hyper;
pub use error::{CliError, Result};
