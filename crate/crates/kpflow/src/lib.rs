//! Command-line driver for the KP hierarchy solver: JSON formats, reports and subcommands.

pub mod commands;
pub mod config;
pub mod json;
pub mod report;
