//! File formats, parallel enumeration and the command-line driver for
//! [`avalanche_core`].

pub mod cli;
pub mod format;
pub mod parallel;
