//! Experiment registry, convergence drivers and table emitters for the
//! `sldg-core` solvers.

pub mod config;
pub mod driver;
pub mod emit;
pub mod error;
pub mod problems;
pub mod registry;

pub use config::{ExperimentConfig, Setup};
pub use driver::{convergence, fill_orders, run, run_setup, ConvergenceRow, Outcome};
pub use emit::Format;
pub use error::{HarnessError, Result};
pub use registry::{find, registry, Example};
