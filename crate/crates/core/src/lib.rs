//! Generalization curves of adversarially trained models.
//!
//! This crate holds the pure numerical side: closed-form losses and their
//! derivatives for the Gaussian-mixture / linear-loss model, the 1-D
//! Gaussian 0-1 model, the Manhattan step-function model, robust SVM and
//! robust 1-D regression trainers, and per-replication Monte Carlo kernels
//! driven by deterministic [`numerics::RandomStream`]s, plus sweep cells and
//! trend detection over the resulting curves.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, parallel
//! sweeps and the command line live in the `robustgen` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;

pub mod curve;
pub mod gauss_linear;
pub mod gauss_zeroone;
pub mod harness;
pub mod manhattan;
pub mod numerics;
pub mod stats;
pub mod trainers;

#[cfg(test)]
mod test_oracles;

pub use error::{Error, Result};
