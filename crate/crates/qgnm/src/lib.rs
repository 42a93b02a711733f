//! File formats, report writers and the experiment runner behind the `qgnm`
//! command-line tool.

pub mod config;
pub mod error;
pub mod formats;
pub mod instance;
pub mod report;
pub mod runner;

pub use error::{Error, Result};
