//! X-GSN metadata configuration files.
//!
//! The file is a `.properties`-style list of `key=value` lines. Instance
//! level keys come first, followed by two keys per property binding:
//!
//! ```text
//! # X-GSN metadata for http://example.org/oi/sensors/demo-weatherstation
//! sensorName=demo-weatherstation
//! sensorType=http\://example.org/oi/types/weatherstation
//! ...
//! temp.propertyName=http\://openiot.eu/ontology/ns/AirTemperature
//! temp.unit=http\://qudt.org/vocab/unit#DegreeCelsius
//! ```
//!
//! In keys and values `\`, `=`, `:` and newlines are written as `\\`, `\=`,
//! `\:` and `\n`. A line splits at its first unescaped `=`.

use thiserror::Error;

use crate::ontology::{
    instance_iri, instance_to_graph, type_iri, Namespaces, OntologyError, SensorInstance,
    SensorType,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetadataError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("duplicate key {key:?} at line {line}")]
    DuplicateKey { key: String, line: usize },
    #[error("invalid key {0:?}")]
    InvalidKey(String),
    #[error(transparent)]
    Ontology(#[from] OntologyError),
}

/// Ordered key/value pairs with unique keys.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MetadataConfig {
    entries: Vec<(String, String)>,
}

impl MetadataConfig {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a pair. Keys are non-empty, free of whitespace and control
    /// characters, and must not start with `#`.
    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) -> Result<(), MetadataError> {
        let key = key.into();
        if !is_valid_key(&key) {
            return Err(MetadataError::InvalidKey(key));
        }
        if self.get(&key).is_some() {
            let line = self.entries.len() + 1;
            return Err(MetadataError::DuplicateKey { key, line });
        }
        self.entries.push((key, value.into()));
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn is_valid_key(key: &str) -> bool {
    !key.is_empty() && !key.starts_with('#') && !key.chars().any(|c| c.is_whitespace() || c.is_control())
}

/// Builds the metadata for `instance`, validating it against `sensor_type`
/// first.
pub fn generate_metadata(
    instance: &SensorInstance,
    sensor_type: &SensorType,
    ns: &Namespaces,
) -> Result<MetadataConfig, MetadataError> {
    // Same preconditions as the RDF mapping.
    instance_to_graph(instance, sensor_type, ns)?;

    let mut config = MetadataConfig::new();
    config.push("sensorName", &instance.id)?;
    config.push("sensorType", type_iri(&sensor_type.id, ns)?.as_str())?;
    config.push("sensorIri", instance_iri(&instance.id, ns)?.as_str())?;
    if let Some(owner) = &instance.owner {
        config.push("author", owner)?;
    }
    if let Some(description) = &instance.description {
        config.push("description", description)?;
    }
    config.push("latitude", instance.latitude.lexical())?;
    config.push("longitude", instance.longitude.lexical())?;
    config.push(
        "featureOfInterest",
        ns.feature_of_interest(&instance.feature_of_interest)?.as_str(),
    )?;
    for binding in &instance.bindings {
        config.push(format!("{}.propertyName", binding.xgsn_field), binding.property.as_str())?;
        config.push(format!("{}.unit", binding.xgsn_field), binding.unit.as_str())?;
    }
    Ok(config)
}

/// Renders the config with a comment header naming the instance IRI.
pub fn render(config: &MetadataConfig) -> String {
    let mut out = String::new();
    match config.get("sensorIri") {
        Some(iri) => out.push_str(&format!("# X-GSN metadata for {}\n", iri.replace('\n', " "))),
        None => out.push_str("# X-GSN metadata\n"),
    }
    for (key, value) in &config.entries {
        escape_into(&mut out, key);
        out.push('=');
        escape_into(&mut out, value);
        out.push('\n');
    }
    out
}

fn escape_into(out: &mut String, text: &str) {
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '=' => out.push_str("\\="),
            ':' => out.push_str("\\:"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
}

/// Inverse of [`render`]. Comment (`#`) and blank lines are skipped.
pub fn parse_metadata(text: &str) -> Result<MetadataConfig, MetadataError> {
    let mut config = MetadataConfig::new();
    for (idx, raw) in text.split('\n').enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let (key, value) = split_line(raw).map_err(|message| MetadataError::Syntax { line, message })?;
        if !is_valid_key(&key) {
            return Err(MetadataError::Syntax {
                line,
                message: format!("invalid key {key:?}"),
            });
        }
        if config.get(&key).is_some() {
            return Err(MetadataError::DuplicateKey { key, line });
        }
        config.entries.push((key, value));
    }
    Ok(config)
}

fn split_line(raw: &str) -> Result<(String, String), String> {
    let mut key = String::new();
    let mut value = String::new();
    let mut in_value = false;
    let mut chars = raw.chars();
    while let Some(c) = chars.next() {
        let target = if in_value { &mut value } else { &mut key };
        match c {
            '\\' => match chars.next() {
                Some('\\') => target.push('\\'),
                Some('=') => target.push('='),
                Some(':') => target.push(':'),
                Some('n') => target.push('\n'),
                Some(other) => return Err(format!("unknown escape sequence \\{other}")),
                None => return Err("line ends with a dangling '\\'".into()),
            },
            '=' if !in_value => in_value = true,
            _ => target.push(c),
        }
    }
    if !in_value {
        return Err("expected '=' separating key and value".into());
    }
    Ok((key, value))
}
