//! Command-line front end: configuration, presets, deterministic reports and
//! the acceptance/verification pipeline.

pub mod config;
pub mod pipeline;
pub mod report;
pub mod verify;
