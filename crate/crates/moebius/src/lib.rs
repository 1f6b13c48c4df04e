//! File formats, Graphviz export, the command-line interface and the
//! acceptance suite for `moebius-core`.

pub mod acceptance;
pub mod cli;
pub mod dot;
pub mod format;
