//! Simulation core for flooding on smoothed dynamic networks.
//!
//! The crate models a dynamic network as a sequence of proposed graphs
//! chosen by an adversary, each perturbed by one of three noise models
//! (background, proportional, targeted) before the per-round flooding
//! step runs on it. Everything here is deterministic given a seed
//! lineage, so trials are reproducible and parallelizable.
//!
//! The crate is `no_std` + `alloc`; IO, configuration and statistics
//! live in the companion CLI crate.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod adversary;
pub mod engine;
mod error;
pub mod graph;
pub mod oracle;
pub mod smoothing;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
