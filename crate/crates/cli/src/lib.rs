//! Command-line front end of `srgeo`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod pipelines;
pub mod verify;
