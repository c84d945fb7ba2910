//! File formats, report writers and the command line for `mscd-core`.

pub mod cli;
pub mod io;
pub mod report;
