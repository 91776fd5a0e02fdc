//! Sweeps, presets and angle optimization on top of `cvbell-core`,
//! with CSV and JSON output for plotting.

pub mod emit;
pub mod error;
pub mod presets;
pub mod spec;
pub mod sweep;

pub use error::{CliError, Result};
pub use spec::SweepSpec;
pub use sweep::{run_sweep, run_sweeps, SweepRow};
