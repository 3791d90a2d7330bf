use serde_json::{json, Map, Value};
use ssnforge_core::metadata::{generate_metadata, render, MetadataError};
use ssnforge_core::ontology::{Namespaces, OntologyError, Violation};
use ssnforge_core::query::QueryError;
use ssnforge_core::rdf::Graph;
use ssnforge_core::registry::{Kind, RegistryEntry, RegistryError, RegistryState};

/// Coarse error classes; the API maps them to HTTP statuses and the CLI to
/// exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureClass {
    BadRequest,
    NotFound,
    Conflict,
    Unprocessable,
    UnsupportedMedia,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub class: FailureClass,
    pub code: String,
    pub message: String,
    pub details: Vec<Violation>,
}

impl Failure {
    pub fn new(class: FailureClass, code: &str, message: impl Into<String>) -> Self {
        Failure {
            class,
            code: code.to_owned(),
            message: message.into(),
            details: Vec::new(),
        }
    }

    pub fn invalid_json(e: &serde_json::Error) -> Self {
        Failure::new(FailureClass::Unprocessable, "INVALID_JSON", e.to_string())
    }

    fn violations(message: &str, details: Vec<Violation>) -> Self {
        let code = details
            .first()
            .map(|v| v.code.as_str())
            .unwrap_or("INVALID_DEFINITION");
        Failure {
            class: FailureClass::Unprocessable,
            code: code.to_owned(),
            message: message.to_owned(),
            details,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl From<OntologyError> for Failure {
    fn from(e: OntologyError) -> Self {
        let code = match &e {
            OntologyError::InvalidType(v) => return Failure::violations("invalid sensor type", v.clone()),
            OntologyError::InvalidInstance(v) => {
                return Failure::violations("invalid sensor instance", v.clone())
            }
            OntologyError::TypeMismatch { .. } => "TYPE_MISMATCH",
            OntologyError::BadSlug(_) => "BAD_SLUG",
            OntologyError::BadBaseIri(_) => "BAD_BASE_IRI",
            OntologyError::BadFeatureOfInterest(_) => "BAD_FOI",
        };
        Failure::new(FailureClass::Unprocessable, code, e.to_string())
    }
}

impl From<RegistryError> for Failure {
    fn from(e: RegistryError) -> Self {
        let message = e.to_string();
        match e {
            RegistryError::AlreadyExists { .. } => {
                Failure::new(FailureClass::Conflict, "ALREADY_EXISTS", message)
            }
            RegistryError::NotFound { .. } => Failure::new(FailureClass::NotFound, "NOT_FOUND", message),
            RegistryError::UnknownType(_) => {
                Failure::new(FailureClass::Unprocessable, "UNKNOWN_TYPE", message)
            }
            RegistryError::ConflictInUse(_) => {
                Failure::new(FailureClass::Conflict, "CONFLICT_IN_USE", message)
            }
            RegistryError::InvalidType(v) => Failure::violations("invalid sensor type", v),
            RegistryError::InvalidInstance(v) => Failure::violations("invalid sensor instance", v),
            RegistryError::Ontology(e) => e.into(),
            RegistryError::CorruptStore { .. } => {
                Failure::new(FailureClass::Internal, "CORRUPT_STORE", message)
            }
            RegistryError::Io(_) => Failure::new(FailureClass::Internal, "IO_ERROR", message),
        }
    }
}

impl From<QueryError> for Failure {
    fn from(e: QueryError) -> Self {
        let code = match e {
            QueryError::Syntax { .. } => "SYNTAX_ERROR",
            QueryError::UndefinedPrefix(_) => "UNDEFINED_PREFIX",
            QueryError::Validation(_) => "INVALID_QUERY",
        };
        Failure::new(FailureClass::BadRequest, code, e.to_string())
    }
}

impl From<MetadataError> for Failure {
    fn from(e: MetadataError) -> Self {
        match e {
            MetadataError::Ontology(e) => e.into(),
            other => Failure::new(FailureClass::Internal, "METADATA_ERROR", other.to_string()),
        }
    }
}

/// `{id, iri, graphIri, tripleCount}`, returned by mutations.
pub fn summary_json(entry: &RegistryEntry) -> Value {
    json!({
        "id": entry.id,
        "iri": entry.iri.as_str(),
        "graphIri": entry.graph_iri.as_str(),
        "tripleCount": entry.graph.len(),
    })
}

/// The definition JSON with the registry fields added alongside.
pub fn entry_json(entry: &RegistryEntry) -> Value {
    let mut map = match entry.definition.to_json() {
        Value::Object(map) => map,
        _ => Map::new(),
    };
    map.insert("iri".into(), entry.iri.as_str().into());
    map.insert("graphIri".into(), entry.graph_iri.as_str().into());
    map.insert("registeredAt".into(), entry.registered_at.to_rfc3339().into());
    map.insert("tripleCount".into(), entry.graph.len().into());
    Value::Object(map)
}

/// The union of all entry graphs of one kind, with the standard prefixes.
pub fn kind_graph(state: &RegistryState, kind: Kind, ns: &Namespaces) -> Graph {
    let mut graph = ns.empty_graph();
    for entry in state.list(kind) {
        graph.extend_from(&entry.graph);
    }
    graph
}

/// The rendered `.metadata` file for a registered instance.
pub fn metadata_text(state: &RegistryState, id: &str, ns: &Namespaces) -> Result<String, Failure> {
    let instance = state
        .get(Kind::Instance, id)
        .and_then(RegistryEntry::sensor_instance)
        .ok_or_else(|| {
            Failure::new(FailureClass::NotFound, "NOT_FOUND", format!("instance {id:?} not found"))
        })?;
    let sensor_type = state.sensor_type(&instance.type_id).ok_or_else(|| {
        Failure::new(
            FailureClass::Internal,
            "CORRUPT_STORE",
            format!("type {:?} missing", instance.type_id),
        )
    })?;
    Ok(render(&generate_metadata(instance, sensor_type, ns)?))
}
