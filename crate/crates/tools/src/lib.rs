//! File formats, JSON reports and the command-line front end for `crn-core`.

pub mod cli;
pub mod export;
pub mod io;
pub mod report;
