//! IO, file formats and command plumbing behind the `infla` binary.

pub mod commands;
pub mod config;
pub mod errors;
pub mod fmtnum;
pub mod io;
pub mod manifest;
pub mod synth;
