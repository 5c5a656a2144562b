//! Monte-Carlo harness, validation suites and file formats around
//! `cfslice-core`. The `cfslice` binary is a thin front end over this crate.

pub mod bench;
pub mod cli;
pub mod harness;
pub mod io;
pub mod presets;
pub mod validate;
