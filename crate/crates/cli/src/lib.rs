//! Command-line front end: argument parsing, dispatch, JSON/SVG emission.
//!
//! Exit code contract: 0 when the operation's verdict is pass/success, 2 when
//! a check fails (validation rule, criterion not certified, optimizer not
//! converged, suite defects), 1 for usage or I/O errors.

pub mod run;
pub mod svg;

pub use run::{run, Cli};
