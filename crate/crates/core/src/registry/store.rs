//! On-disk layout: `store.nq` holds every entry graph as N-Quads and
//! `index.json` holds the entry definitions. Both are rewritten through a
//! temporary file and a rename.

use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::ontology::{instance_to_graph, type_to_graph, Namespaces, SensorInstance, SensorType};
use crate::rdf::{parse_nquads, serialize_nquads, Iri};

use super::{graph_iri_for, Definition, Kind, RegistryEntry, RegistryError, RegistryState};

pub const STORE_FILE: &str = "store.nq";
pub const INDEX_FILE: &str = "index.json";

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct IndexRecord {
    kind: Kind,
    id: String,
    iri: Iri,
    graph_iri: Iri,
    registered_at: DateTime<Utc>,
    definition: serde_json::Value,
}

fn render_index(state: &RegistryState) -> String {
    let records: Vec<IndexRecord> = state
        .entries()
        .map(|e| IndexRecord {
            kind: e.kind,
            id: e.id.clone(),
            iri: e.iri.clone(),
            graph_iri: e.graph_iri.clone(),
            registered_at: e.registered_at,
            definition: e.definition.to_json(),
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&records).expect("index serializes");
    text.push('\n');
    text
}

/// Temporary files written but not yet renamed into place. Dropping an
/// uncommitted snapshot deletes the temporaries, leaving the store as it
/// was.
#[derive(Debug)]
pub struct StagedSnapshot {
    files: Vec<(PathBuf, PathBuf)>,
    dir: PathBuf,
}

impl StagedSnapshot {
    pub fn temp_paths(&self) -> impl Iterator<Item = &Path> {
        self.files.iter().map(|(tmp, _)| tmp.as_path())
    }

    pub fn commit(mut self) -> io::Result<()> {
        for (tmp, target) in &self.files {
            fs::rename(tmp, target)?;
        }
        self.files.clear();
        // Make the renames durable where the platform allows it.
        if let Ok(dir) = File::open(&self.dir) {
            let _ = dir.sync_all();
        }
        Ok(())
    }
}

impl Drop for StagedSnapshot {
    fn drop(&mut self) {
        for (tmp, _) in &self.files {
            let _ = fs::remove_file(tmp);
        }
    }
}

/// Writes both files of `state` to temporaries inside `dir`.
pub fn stage(state: &RegistryState, dir: &Path) -> io::Result<StagedSnapshot> {
    fs::create_dir_all(dir)?;
    let mut staged = StagedSnapshot {
        files: Vec::new(),
        dir: dir.to_path_buf(),
    };
    for (name, contents) in [
        (STORE_FILE, serialize_nquads(state.dataset())),
        (INDEX_FILE, render_index(state)),
    ] {
        let tmp = dir.join(format!(".{name}.tmp"));
        staged.files.push((tmp.clone(), dir.join(name)));
        let mut file = File::create(&tmp)?;
        file.write_all(contents.as_bytes())?;
        file.sync_all()?;
    }
    Ok(staged)
}

pub fn persist(state: &RegistryState, dir: &Path) -> io::Result<()> {
    stage(state, dir)?.commit()
}

fn corrupt(file: &str, line: Option<usize>, message: impl Into<String>) -> RegistryError {
    RegistryError::CorruptStore {
        file: file.to_owned(),
        line,
        message: message.into(),
    }
}

fn read_optional(path: &Path) -> io::Result<Option<String>> {
    match fs::read_to_string(path) {
        Ok(text) => Ok(Some(text)),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e),
    }
}

/// Reads the store in `dir`. A missing directory or a directory without
/// either file is an empty registry. Every definition is validated and
/// remapped, and the result must match `store.nq` quad for quad.
pub fn load(dir: &Path, ns: &Namespaces) -> Result<RegistryState, RegistryError> {
    let store = read_optional(&dir.join(STORE_FILE))?;
    let index = read_optional(&dir.join(INDEX_FILE))?;
    let (store, index) = match (store, index) {
        (None, None) => return Ok(RegistryState::default()),
        (Some(_), None) => return Err(corrupt(INDEX_FILE, None, "file is missing")),
        (None, Some(_)) => return Err(corrupt(STORE_FILE, None, "file is missing")),
        (Some(s), Some(i)) => (s, i),
    };

    parse_nquads(&store).map_err(|e| match e {
        crate::rdf::RdfError::Syntax { line, message, .. } => corrupt(STORE_FILE, Some(line), message),
        other => corrupt(STORE_FILE, None, other.to_string()),
    })?;
    let records: Vec<IndexRecord> =
        serde_json::from_str(&index).map_err(|e| corrupt(INDEX_FILE, Some(e.line()), e.to_string()))?;

    let state = rebuild(records, ns)?;
    check_quads(&state, &store)?;
    Ok(state)
}

fn rebuild(mut records: Vec<IndexRecord>, ns: &Namespaces) -> Result<RegistryState, RegistryError> {
    // Types first so instances can be checked against them.
    records.sort_by(|a, b| (a.kind, &a.id).cmp(&(b.kind, &b.id)));
    let mut state = RegistryState::default();
    for record in records {
        let what = format!("{} {:?}", record.kind, record.id);
        let bad = |message: String| corrupt(INDEX_FILE, None, format!("{what}: {message}"));
        if state.get(record.kind, &record.id).is_some() {
            return Err(bad("duplicate entry".into()));
        }
        let (definition, graph) = match record.kind {
            Kind::Type => {
                let t: SensorType =
                    serde_json::from_value(record.definition).map_err(|e| bad(e.to_string()))?;
                let graph = type_to_graph(&t, ns).map_err(|e| bad(e.to_string()))?;
                (Definition::Type(t), graph)
            }
            Kind::Instance => {
                let i: SensorInstance =
                    serde_json::from_value(record.definition).map_err(|e| bad(e.to_string()))?;
                let t = state
                    .sensor_type(&i.type_id)
                    .ok_or_else(|| bad(format!("unknown sensor type {:?}", i.type_id)))?;
                let graph = instance_to_graph(&i, t, ns).map_err(|e| bad(e.to_string()))?;
                (Definition::Instance(i), graph)
            }
        };
        if definition.id() != record.id {
            return Err(bad(format!("definition id is {:?}", definition.id())));
        }
        let entry = RegistryEntry::new(definition, graph, record.registered_at, ns)
            .map_err(|e| bad(e.to_string()))?;
        if entry.iri != record.iri || entry.graph_iri != record.graph_iri {
            return Err(bad(format!(
                "recorded IRIs <{}> <{}> differ from <{}> <{}>",
                record.iri,
                record.graph_iri,
                entry.iri,
                graph_iri_for(&entry.iri)
            )));
        }
        state.insert(entry);
    }
    Ok(state)
}

/// The quads in `store` must be exactly those derived from the index.
fn check_quads(state: &RegistryState, store: &str) -> Result<(), RegistryError> {
    let expected_text = serialize_nquads(state.dataset());
    let expected: BTreeSet<&str> = expected_text.lines().collect();
    let mut seen = BTreeSet::new();
    for (idx, line) in store.lines().enumerate() {
        let quad = parse_nquads(line).map_err(|e| corrupt(STORE_FILE, Some(idx + 1), e.to_string()))?;
        if quad.is_empty() {
            continue;
        }
        let canonical = serialize_nquads(&quad);
        let canonical = canonical.trim_end();
        match expected.get(canonical) {
            Some(found) => {
                seen.insert(*found);
            }
            None => {
                return Err(corrupt(
                    STORE_FILE,
                    Some(idx + 1),
                    "quad does not follow from the index",
                ))
            }
        }
    }
    if let Some(missing) = expected.iter().find(|q| !seen.contains(*q)) {
        return Err(corrupt(STORE_FILE, None, format!("missing quad {missing}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::registry::Registry;

    fn populated(dir: &Path) -> Registry {
        let r = Registry::open(dir, Namespaces::default()).unwrap();
        r.register_type(fixtures::weather_station()).unwrap();
        r.register_instance(fixtures::demo_weatherstation()).unwrap();
        r
    }

    #[test]
    fn empty_dir_is_empty_registry() {
        let dir = tempfile::tempdir().unwrap();
        let state = load(&dir.path().join("absent"), &Namespaces::default()).unwrap();
        assert!(state.is_empty());
    }

    #[test]
    fn persist_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let r = populated(dir.path());
        let loaded = load(dir.path(), &Namespaces::default()).unwrap();
        assert_eq!(loaded, *r.snapshot());
        let store = fs::read_to_string(dir.path().join(STORE_FILE)).unwrap();
        assert_eq!(store.lines().count(), 45);
        assert!(!dir.path().join(".store.nq.tmp").exists());
    }

    #[test]
    fn decimal_lexical_forms_survive() {
        let dir = tempfile::tempdir().unwrap();
        populated(dir.path());
        let index = fs::read_to_string(dir.path().join(INDEX_FILE)).unwrap();
        assert!(index.contains("46.5197"), "{index}");
        let state = load(dir.path(), &Namespaces::default()).unwrap();
        let i = state.get(Kind::Instance, "demo-weatherstation").unwrap();
        assert_eq!(i.sensor_instance().unwrap().longitude.lexical(), "6.5668");
    }

    #[test]
    fn uncommitted_stage_leaves_store_alone() {
        let dir = tempfile::tempdir().unwrap();
        let r = populated(dir.path());
        let before = fs::read(dir.path().join(STORE_FILE)).unwrap();
        let staged = stage(&RegistryState::default(), dir.path()).unwrap();
        let temps: Vec<PathBuf> = staged.temp_paths().map(Path::to_path_buf).collect();
        assert!(temps.iter().all(|t| t.exists()));
        drop(staged);
        assert!(temps.iter().all(|t| !t.exists()));
        assert_eq!(fs::read(dir.path().join(STORE_FILE)).unwrap(), before);
        assert_eq!(load(dir.path(), &Namespaces::default()).unwrap(), *r.snapshot());
    }

    #[test]
    fn tampered_store_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        populated(dir.path());
        let path = dir.path().join(STORE_FILE);
        let original = fs::read_to_string(&path).unwrap();

        let extra = format!("{original}<http://x/a> <http://x/b> <http://x/c> <http://x/g> .\n");
        fs::write(&path, extra).unwrap();
        match load(dir.path(), &Namespaces::default()) {
            Err(RegistryError::CorruptStore { file, line, .. }) => {
                assert_eq!(file, STORE_FILE);
                assert_eq!(line, Some(46));
            }
            other => panic!("unexpected {other:?}"),
        }

        let dropped: String = original.lines().skip(1).map(|l| format!("{l}\n")).collect();
        fs::write(&path, dropped).unwrap();
        assert!(matches!(
            load(dir.path(), &Namespaces::default()),
            Err(RegistryError::CorruptStore { line: None, .. })
        ));

        fs::write(&path, "<http://x/a> <http://x/b> .\n").unwrap();
        assert!(matches!(
            load(dir.path(), &Namespaces::default()),
            Err(RegistryError::CorruptStore { line: Some(1), .. })
        ));
    }

    #[test]
    fn tampered_index_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        populated(dir.path());
        let path = dir.path().join(INDEX_FILE);
        let original = fs::read_to_string(&path).unwrap();
        fs::write(&path, original.replace("46.5197", "146.5197")).unwrap();
        assert!(matches!(
            load(dir.path(), &Namespaces::default()),
            Err(RegistryError::CorruptStore { file, .. }) if file == INDEX_FILE
        ));
        fs::write(&path, "[\n{").unwrap();
        assert!(matches!(
            load(dir.path(), &Namespaces::default()),
            Err(RegistryError::CorruptStore { line: Some(2), .. })
        ));
        fs::remove_file(&path).unwrap();
        assert!(matches!(
            load(dir.path(), &Namespaces::default()),
            Err(RegistryError::CorruptStore { file, .. }) if file == INDEX_FILE
        ));
    }
}
