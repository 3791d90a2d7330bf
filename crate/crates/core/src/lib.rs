//! Sensor schema registry built on the SSN ontology.
//!
//! Sensor types and deployed sensor instances are validated, mapped to
//! RDF graphs, stored as named graphs in a file-backed registry and made
//! discoverable through a small SPARQL subset. Instances can also be
//! exported as X-GSN metadata configuration files.

pub mod fixtures;
pub mod metadata;
pub mod ontology;
pub mod query;
pub mod rdf;
pub mod registry;
