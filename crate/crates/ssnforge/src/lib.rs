//! HTTP service and command-line front end over the `ssnforge-core`
//! registry.

pub mod api;
pub mod cli;
mod common;

pub use common::{entry_json, kind_graph, metadata_text, summary_json, Failure, FailureClass};
