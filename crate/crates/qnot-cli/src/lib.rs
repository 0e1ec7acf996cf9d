//! Library surface of the command-line tool: record types, CSV/JSON
//! rendering and parsing, and the command implementations. The binary in
//! `main.rs` only parses arguments and maps outcomes to exit codes.

pub mod commands;
pub mod report;
