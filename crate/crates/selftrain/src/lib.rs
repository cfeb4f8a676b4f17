//! File formats, reports, parallel benchmarking and the command line around
//! [`selftrain_core`].

pub mod bench;
pub mod cli;
mod error;
pub mod io;
pub mod trace;

pub use error::{Error, Result};
