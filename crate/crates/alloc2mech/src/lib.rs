//! Verification harness, file formats and command line for the single-call
//! allocation-to-mechanism transformation in `alloc2mech-core`.
//!
//! - [`checks`]: statistical and exhaustive checks producing [`checks::CheckReport`]s.
//! - [`suite`]: the acceptance suite, parameterized by sizes.
//! - [`scenarios`]: runnable experiments behind `alloc2mech run`.
//! - [`io`], [`config`]: file formats and the flat key=value config.

pub mod checks;
pub mod config;
pub mod controls;
pub mod error;
pub mod graphgen;
pub mod io;
pub mod oracle;
pub mod rewards;
pub mod scenarios;
pub mod stats;
pub mod suite;

pub use error::{Error, Result};
