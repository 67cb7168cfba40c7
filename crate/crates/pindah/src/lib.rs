//! Command-line driver for the PINDAH compiler: file formats (column
//! manifests, simulator stores, configuration), the benchmark harness and
//! the `pindah` subcommands.

pub mod bench;
pub mod cli;
pub mod config;
pub mod manifest;
pub mod store;

pub use pindah_core as core;
