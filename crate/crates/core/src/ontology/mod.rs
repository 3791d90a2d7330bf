//! Sensor types and deployed sensor instances, their validation and their
//! mapping onto SSN-shaped RDF graphs.

mod mapping;
mod model;
mod namespaces;
mod validate;

use thiserror::Error;

pub use mapping::{instance_iri, instance_to_graph, property_slugs, type_iri, type_to_graph};
pub use model::{
    Decimal, InvalidDecimal, Measurement, MeasurementCapability, ObservedProperty, PropertyBinding,
    SensorInstance, SensorType,
};
pub use namespaces::{
    is_slug, mint_iri, slugify, units, IriKind, Namespaces, DEFAULT_BASE_IRI, GEO, OIOT, RDF,
    RDFS, SSN, UNIT, XSD,
};
pub use validate::{is_field_name, validate_instance, validate_type, Violation, ViolationCode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OntologyError {
    #[error("invalid sensor type: {}", join(.0))]
    InvalidType(Vec<Violation>),
    #[error("invalid sensor instance: {}", join(.0))]
    InvalidInstance(Vec<Violation>),
    #[error("instance declares type {instance_type:?} but was paired with type {type_id:?}")]
    TypeMismatch { instance_type: String, type_id: String },
    #[error("{0:?} is not a slug ([a-z0-9-]+)")]
    BadSlug(String),
    #[error("base IRI {0:?} must end with '/' or '#'")]
    BadBaseIri(String),
    #[error("feature of interest {0:?} is neither an absolute IRI nor a slug")]
    BadFeatureOfInterest(String),
}

impl OntologyError {
    pub fn violations(&self) -> &[Violation] {
        match self {
            OntologyError::InvalidType(v) | OntologyError::InvalidInstance(v) => v,
            _ => &[],
        }
    }
}

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
