//! Experiment driver for clustered Vandermonde matrices: JSON configs,
//! seeded sweeps, slope fits, CSV/SVG output and invariant suites.

pub mod config;
pub mod emit;
pub mod error;
pub mod fit;
pub mod record;
pub mod sweep;
pub mod verify;

pub use config::{Config, Experiment};
pub use error::{CliError, CliResult};
pub use record::SweepRecord;
