//! File-backed registry of sensor types and instances.
//!
//! Every entry owns one named graph (`<entry IRI>/graph`) in the registry
//! dataset. Writers are serialized and each successful mutation is
//! persisted before the new state becomes visible; readers take an
//! immutable snapshot.

mod store;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::{
    instance_iri, instance_to_graph, type_iri, type_to_graph, validate_instance, validate_type,
    Namespaces, OntologyError, SensorInstance, SensorType, Violation,
};
use crate::rdf::{Dataset, Graph, Iri};

pub use store::{load, persist, stage, StagedSnapshot, INDEX_FILE, STORE_FILE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Type,
    Instance,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Type => "type",
            Kind::Instance => "instance",
        })
    }
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("{kind} {id:?} already exists")]
    AlreadyExists { kind: Kind, id: String },
    #[error("{kind} {id:?} not found")]
    NotFound { kind: Kind, id: String },
    #[error("unknown sensor type {0:?}")]
    UnknownType(String),
    #[error("{0}")]
    ConflictInUse(String),
    #[error("invalid sensor type")]
    InvalidType(Vec<Violation>),
    #[error("invalid sensor instance")]
    InvalidInstance(Vec<Violation>),
    #[error(transparent)]
    Ontology(OntologyError),
    #[error("corrupt store: {file}{}: {message}", .line.map(|l| format!(" line {l}")).unwrap_or_default())]
    CorruptStore {
        file: String,
        line: Option<usize>,
        message: String,
    },
    #[error("store I/O failed: {0}")]
    Io(#[from] io::Error),
}

impl From<OntologyError> for RegistryError {
    fn from(e: OntologyError) -> Self {
        match e {
            OntologyError::InvalidType(v) => RegistryError::InvalidType(v),
            OntologyError::InvalidInstance(v) => RegistryError::InvalidInstance(v),
            other => RegistryError::Ontology(other),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Definition {
    Type(SensorType),
    Instance(SensorInstance),
}

impl Definition {
    pub fn kind(&self) -> Kind {
        match self {
            Definition::Type(_) => Kind::Type,
            Definition::Instance(_) => Kind::Instance,
        }
    }

    pub fn id(&self) -> &str {
        match self {
            Definition::Type(t) => &t.id,
            Definition::Instance(i) => &i.id,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Definition::Type(t) => serde_json::to_value(t),
            Definition::Instance(i) => serde_json::to_value(i),
        }
        .expect("definitions serialize to JSON")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegistryEntry {
    pub kind: Kind,
    pub id: String,
    pub iri: Iri,
    pub graph_iri: Iri,
    pub definition: Definition,
    pub graph: Graph,
    pub registered_at: DateTime<Utc>,
}

impl RegistryEntry {
    fn new(
        definition: Definition,
        graph: Graph,
        registered_at: DateTime<Utc>,
        ns: &Namespaces,
    ) -> Result<Self, RegistryError> {
        let kind = definition.kind();
        let id = definition.id().to_owned();
        let iri = entry_iri(kind, &id, ns)?;
        let graph_iri = graph_iri_for(&iri);
        Ok(RegistryEntry {
            kind,
            id,
            iri,
            graph_iri,
            definition,
            graph,
            registered_at,
        })
    }

    pub fn sensor_type(&self) -> Option<&SensorType> {
        match &self.definition {
            Definition::Type(t) => Some(t),
            Definition::Instance(_) => None,
        }
    }

    pub fn sensor_instance(&self) -> Option<&SensorInstance> {
        match &self.definition {
            Definition::Instance(i) => Some(i),
            Definition::Type(_) => None,
        }
    }
}

pub fn entry_iri(kind: Kind, id: &str, ns: &Namespaces) -> Result<Iri, OntologyError> {
    match kind {
        Kind::Type => type_iri(id, ns),
        Kind::Instance => instance_iri(id, ns),
    }
}

pub fn graph_iri_for(entry_iri: &Iri) -> Iri {
    Iri::new(format!("{entry_iri}/graph")).expect("suffixing a path keeps the IRI valid")
}

/// An immutable registry snapshot. Entries and dataset graphs correspond
/// one to one.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegistryState {
    entries: BTreeMap<(Kind, String), RegistryEntry>,
    dataset: Dataset,
}

impl RegistryState {
    pub fn get(&self, kind: Kind, id: &str) -> Option<&RegistryEntry> {
        self.entries.get(&(kind, id.to_owned()))
    }

    /// Entries of one kind, ordered by id.
    pub fn list(&self, kind: Kind) -> Vec<&RegistryEntry> {
        self.entries
            .values()
            .filter(|e| e.kind == kind)
            .collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &RegistryEntry> {
        self.entries.values()
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn count(&self, kind: Kind) -> usize {
        self.entries.keys().filter(|(k, _)| *k == kind).count()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sensor_type(&self, id: &str) -> Option<&SensorType> {
        self.get(Kind::Type, id).and_then(RegistryEntry::sensor_type)
    }

    pub fn instances_of<'a>(&'a self, type_id: &'a str) -> impl Iterator<Item = &'a SensorInstance> + 'a {
        self.entries
            .values()
            .filter_map(RegistryEntry::sensor_instance)
            .filter(move |i| i.type_id == type_id)
    }

    fn insert(&mut self, entry: RegistryEntry) {
        self.dataset
            .insert_graph(entry.graph_iri.clone(), entry.graph.clone());
        self.entries.insert((entry.kind, entry.id.clone()), entry);
    }

    fn remove(&mut self, kind: Kind, id: &str) -> Option<RegistryEntry> {
        let entry = self.entries.remove(&(kind, id.to_owned()))?;
        self.dataset.remove_graph(&entry.graph_iri);
        Some(entry)
    }

    /// Every instance's type is registered.
    fn check_references(&self) -> Result<(), String> {
        for i in self.entries.values().filter_map(RegistryEntry::sensor_instance) {
            if self.sensor_type(&i.type_id).is_none() {
                return Err(format!(
                    "instance {:?} refers to missing type {:?}",
                    i.id, i.type_id
                ));
            }
        }
        Ok(())
    }
}

/// The shared registry handle.
pub struct Registry {
    ns: Namespaces,
    data_dir: Option<PathBuf>,
    current: RwLock<Arc<RegistryState>>,
    writer: Mutex<()>,
}

impl Registry {
    /// Opens (or initializes) the store in `data_dir`, re-validating its
    /// contents.
    pub fn open(data_dir: impl Into<PathBuf>, ns: Namespaces) -> Result<Self, RegistryError> {
        let data_dir = data_dir.into();
        let state = load(&data_dir, &ns)?;
        Ok(Registry {
            ns,
            data_dir: Some(data_dir),
            current: RwLock::new(Arc::new(state)),
            writer: Mutex::new(()),
        })
    }

    /// A registry that is never written to disk.
    pub fn in_memory(ns: Namespaces) -> Self {
        Registry {
            ns,
            data_dir: None,
            current: RwLock::new(Arc::new(RegistryState::default())),
            writer: Mutex::new(()),
        }
    }

    pub fn namespaces(&self) -> &Namespaces {
        &self.ns
    }

    pub fn data_dir(&self) -> Option<&Path> {
        self.data_dir.as_deref()
    }

    pub fn snapshot(&self) -> Arc<RegistryState> {
        Arc::clone(&self.current.read().unwrap_or_else(|e| e.into_inner()))
    }

    pub fn get(&self, kind: Kind, id: &str) -> Result<RegistryEntry, RegistryError> {
        self.snapshot()
            .get(kind, id)
            .cloned()
            .ok_or_else(|| not_found(kind, id))
    }

    pub fn list(&self, kind: Kind) -> Vec<RegistryEntry> {
        self.snapshot().list(kind).into_iter().cloned().collect()
    }

    pub fn register_type(&self, t: SensorType) -> Result<RegistryEntry, RegistryError> {
        self.mutate(|state, ns| {
            let violations = validate_type(&t);
            if !violations.is_empty() {
                return Err(RegistryError::InvalidType(violations));
            }
            if state.get(Kind::Type, &t.id).is_some() {
                return Err(RegistryError::AlreadyExists {
                    kind: Kind::Type,
                    id: t.id.clone(),
                });
            }
            let graph = type_to_graph(&t, ns)?;
            let entry = RegistryEntry::new(Definition::Type(t), graph, Utc::now(), ns)?;
            state.insert(entry.clone());
            Ok(entry)
        })
    }

    /// Replaces a type definition. While instances of the type exist its
    /// set of observed properties cannot change, since each instance binds
    /// exactly that set; dependent instance graphs are regenerated.
    pub fn update_type(&self, t: SensorType) -> Result<RegistryEntry, RegistryError> {
        self.mutate(|state, ns| {
            let previous = state
                .get(Kind::Type, &t.id)
                .ok_or_else(|| not_found(Kind::Type, &t.id))?
                .clone();
            let violations = validate_type(&t);
            if !violations.is_empty() {
                return Err(RegistryError::InvalidType(violations));
            }
            let new_props: BTreeSet<&Iri> = t.observes.iter().map(|p| &p.iri).collect();
            let instances: Vec<SensorInstance> = state.instances_of(&t.id).cloned().collect();
            for i in &instances {
                if let Some(b) = i.bindings.iter().find(|b| !new_props.contains(&b.property)) {
                    return Err(RegistryError::ConflictInUse(format!(
                        "instance {:?} binds property {} which the update removes",
                        i.id, b.property
                    )));
                }
                let bound: BTreeSet<&Iri> = i.bindings.iter().map(|b| &b.property).collect();
                if let Some(p) = new_props.iter().find(|p| !bound.contains(*p)) {
                    return Err(RegistryError::ConflictInUse(format!(
                        "instance {:?} has no binding for added property {p}",
                        i.id
                    )));
                }
            }
            let graph = type_to_graph(&t, ns)?;
            let entry = RegistryEntry::new(Definition::Type(t.clone()), graph, previous.registered_at, ns)?;
            state.insert(entry.clone());
            for i in instances {
                let registered_at = state
                    .get(Kind::Instance, &i.id)
                    .map(|e| e.registered_at)
                    .unwrap_or_else(Utc::now);
                let graph = instance_to_graph(&i, &t, ns)?;
                state.insert(RegistryEntry::new(Definition::Instance(i), graph, registered_at, ns)?);
            }
            Ok(entry)
        })
    }

    pub fn register_instance(&self, i: SensorInstance) -> Result<RegistryEntry, RegistryError> {
        self.mutate(|state, ns| {
            let t = state
                .sensor_type(&i.type_id)
                .ok_or_else(|| RegistryError::UnknownType(i.type_id.clone()))?
                .clone();
            let violations = validate_instance(&i, &t);
            if !violations.is_empty() {
                return Err(RegistryError::InvalidInstance(violations));
            }
            if state.get(Kind::Instance, &i.id).is_some() {
                return Err(RegistryError::AlreadyExists {
                    kind: Kind::Instance,
                    id: i.id.clone(),
                });
            }
            let graph = instance_to_graph(&i, &t, ns)?;
            let entry = RegistryEntry::new(Definition::Instance(i), graph, Utc::now(), ns)?;
            state.insert(entry.clone());
            Ok(entry)
        })
    }

    pub fn remove(&self, kind: Kind, id: &str) -> Result<(), RegistryError> {
        self.mutate(|state, _| {
            if state.get(kind, id).is_none() {
                return Err(not_found(kind, id));
            }
            if kind == Kind::Type {
                let users: Vec<&str> = state.instances_of(id).map(|i| i.id.as_str()).collect();
                if !users.is_empty() {
                    return Err(RegistryError::ConflictInUse(format!(
                        "type {id:?} is used by instances [{}]",
                        users.join(", ")
                    )));
                }
            }
            state.remove(kind, id);
            Ok(())
        })
    }

    /// Applies `change` to a copy of the current state, persists the result
    /// and only then publishes it. On any error the visible state and the
    /// files on disk are left as they were.
    fn mutate<T>(
        &self,
        change: impl FnOnce(&mut RegistryState, &Namespaces) -> Result<T, RegistryError>,
    ) -> Result<T, RegistryError> {
        let _guard = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let mut next = (*self.snapshot()).clone();
        let out = change(&mut next, &self.ns)?;
        next.check_references().map_err(RegistryError::ConflictInUse)?;
        if let Some(dir) = &self.data_dir {
            persist(&next, dir)?;
        }
        *self.current.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(next);
        Ok(out)
    }
}

fn not_found(kind: Kind, id: &str) -> RegistryError {
    RegistryError::NotFound {
        kind,
        id: id.to_owned(),
    }
}
