//! Experiment harness for PNPM schemes: solution snapshots, convergence
//! tables, the pointwise-condition counterexample and the invertibility
//! table of the reconstruction.

pub mod commands;
pub mod config;
pub mod error;
pub mod problems;

pub use config::RunConfig;
pub use error::{exit, CliError};
pub use problems::{Problem, Profile, Setup};
