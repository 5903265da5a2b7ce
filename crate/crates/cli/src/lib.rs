//! Front end for `dephaser-core`: run configuration, CSV output, the
//! figure and sweep commands, and the acceptance suite.
pub mod acceptance;
pub mod commands;
pub mod config;
pub mod table;
