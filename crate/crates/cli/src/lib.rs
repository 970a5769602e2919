//! Experiment harness around `smoothflood-core`: configuration parsing,
//! parallel trial execution, summary statistics, CSV/JSONL emission, and
//! the numbered validation suites.

pub mod config;
pub mod runner;
pub mod stats;
pub mod suites;
