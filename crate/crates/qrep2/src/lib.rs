//! File formats and command-line front end for [`qrep2_core`].

pub mod artifact;
pub mod cli;
pub mod report;
