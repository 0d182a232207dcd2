//! File formats, workspace configuration, and command implementations for
//! the `synthnet` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
