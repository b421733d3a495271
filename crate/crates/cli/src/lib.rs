//! Scenario files, runs and reports for galilean-core.

pub mod config;
pub mod report;
pub mod runner;
pub mod scenarios;
