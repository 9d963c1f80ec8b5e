//! Library surface of the sympcode CLI: verification suites and subcommand
//! implementations, reused by the binary and the acceptance tests.

pub mod commands;
pub mod suites;
