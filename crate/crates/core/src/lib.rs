#![no_std]
//! Exact simulation of the quantum verifier for group non-membership over
//! black-box groups.

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod blackbox;
pub mod certificates;
pub mod error;
pub mod fixtures;
pub mod sampler;
pub mod statevec;
pub mod tolerance;
pub mod verifier;

pub use error::{Error, Result};
