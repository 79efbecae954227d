//! Sweeps, file formats, the oracle suite and the command line for
//! [`robustgen_core`].

pub mod cli;
pub mod config;
pub mod emit;
pub mod error;
pub mod oracles;
pub mod sweep;
pub mod verify;

pub use error::AppError;
