//! Run configuration, deterministic JSON/CSV/SVG emission, and the
//! commands behind the `fracground` binary.
//!
//! Exit codes: 0 pass, 1 operational error, 2 verification failure.

mod commands;
mod config;
mod output;
pub mod svg;

pub use commands::*;
pub use config::*;
pub use output::{CsvTable, atomic_write, fmt_number, to_json};
