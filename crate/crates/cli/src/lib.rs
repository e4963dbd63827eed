//! Front end for the slope hopper simulator: scenario files, single runs,
//! the three-stage reproduction and parameter sweeps.

pub mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use app::run;
pub use commands::{cmd_reproduce, cmd_run, cmd_sweep, Axis};
pub use config::ConfigFile;
pub use error::CliError;
