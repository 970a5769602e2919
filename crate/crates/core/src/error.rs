use alloc::string::String;
use core::fmt;

/// Errors surfaced by samplers, adversaries and the round engine.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two graphs with different vertex counts were combined.
    MismatchedVertexCount { left: usize, right: usize },
    /// An `EdgeDelta` did not satisfy its invariants against the target graph.
    InvalidDelta(String),
    /// A sampler argument was outside its domain (negative `x`, `t > n/16`, ...).
    InvalidParameter(String),
    /// Rejection sampling exceeded its retry ceiling without producing a
    /// connected graph. Signals misuse outside the supported noise regime;
    /// never silently degraded to a biased draw.
    SamplerStarvation { retries: u64 },
    /// A configuration violated a model or adversary premise.
    Config(String),
    /// An exhaustive oracle was asked for more work than its budget allows.
    BudgetExceeded(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::MismatchedVertexCount { left, right } => {
                write!(f, "graphs have different vertex counts: {left} vs {right}")
            }
            Error::InvalidDelta(msg) => write!(f, "invalid edge delta: {msg}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::SamplerStarvation { retries } => {
                write!(f, "rejection sampler starved after {retries} retries")
            }
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::BudgetExceeded(msg) => write!(f, "oracle budget exceeded: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
