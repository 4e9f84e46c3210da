//! Command-line front end: batch file mode and the interactive loop.

pub mod app;
pub mod config;

pub use app::{run, run_batch, run_repl, Status};
pub use config::{Config, Format};
