//! Command-line pipeline around `topictrace-core`: file formats, run
//! configuration, the individual stages and the run report.

pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod parallel;
pub mod report_dir;
pub mod sample;
pub mod stages;
pub mod synth;
