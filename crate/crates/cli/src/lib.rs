//! Input format, check dispatch and suites for the command-line tool.

pub mod app;
pub mod checks;
pub mod doc;
pub mod model;
pub mod report;
