use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rdf::Iri;

use super::namespaces::is_slug;
use super::{SensorInstance, SensorType};

/// Stable machine-readable violation codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    EmptyObserves,
    DupProperty,
    DupCapability,
    BadSlug,
    NegAccuracy,
    NonposFrequency,
    CapUnknownProperty,
    LatRange,
    LonRange,
    BindingMismatch,
    DupField,
    BadFieldName,
    BadFoi,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::EmptyObserves => "EMPTY_OBSERVES",
            ViolationCode::DupProperty => "DUP_PROPERTY",
            ViolationCode::DupCapability => "DUP_CAPABILITY",
            ViolationCode::BadSlug => "BAD_SLUG",
            ViolationCode::NegAccuracy => "NEG_ACCURACY",
            ViolationCode::NonposFrequency => "NONPOS_FREQUENCY",
            ViolationCode::CapUnknownProperty => "CAP_UNKNOWN_PROPERTY",
            ViolationCode::LatRange => "LAT_RANGE",
            ViolationCode::LonRange => "LON_RANGE",
            ViolationCode::BindingMismatch => "BINDING_MISMATCH",
            ViolationCode::DupField => "DUP_FIELD",
            ViolationCode::BadFieldName => "BAD_FIELD_NAME",
            ViolationCode::BadFoi => "BAD_FOI",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

impl Violation {
    fn new(code: ViolationCode, message: impl Into<String>) -> Self {
        Violation {
            code,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

pub fn validate_type(t: &SensorType) -> Vec<Violation> {
    let mut out = Vec::new();
    if !is_slug(&t.id) {
        out.push(Violation::new(
            ViolationCode::BadSlug,
            format!("type id {:?} must match [a-z0-9-]+", t.id),
        ));
    }
    if t.observes.is_empty() {
        out.push(Violation::new(
            ViolationCode::EmptyObserves,
            "a sensor type must observe at least one property",
        ));
    }
    let mut seen = BTreeSet::new();
    for p in &t.observes {
        if !seen.insert(&p.iri) {
            out.push(Violation::new(
                ViolationCode::DupProperty,
                format!("property {} is listed more than once", p.iri),
            ));
        }
    }
    let mut with_capability = BTreeSet::new();
    for cap in &t.capabilities {
        if !seen.contains(&cap.property) {
            out.push(Violation::new(
                ViolationCode::CapUnknownProperty,
                format!("capability refers to {} which the type does not observe", cap.property),
            ));
        } else if !with_capability.insert(&cap.property) {
            out.push(Violation::new(
                ViolationCode::DupCapability,
                format!("property {} has more than one measurement capability", cap.property),
            ));
        }
        if let Some(acc) = &cap.accuracy {
            if acc.value.value() < 0.0 {
                out.push(Violation::new(
                    ViolationCode::NegAccuracy,
                    format!("accuracy {} for {} is negative", acc.value, cap.property),
                ));
            }
        }
        if let Some(freq) = &cap.frequency {
            if freq.value.value() <= 0.0 {
                out.push(Violation::new(
                    ViolationCode::NonposFrequency,
                    format!("frequency {} for {} must be positive", freq.value, cap.property),
                ));
            }
        }
    }
    out
}

/// Validates an instance against its type. The caller is responsible for
/// pairing the instance with the type named by `type_id`.
pub fn validate_instance(i: &SensorInstance, t: &SensorType) -> Vec<Violation> {
    let mut out = Vec::new();
    if !is_slug(&i.id) {
        out.push(Violation::new(
            ViolationCode::BadSlug,
            format!("instance id {:?} must match [a-z0-9-]+", i.id),
        ));
    }
    if !is_slug(&i.type_id) {
        out.push(Violation::new(
            ViolationCode::BadSlug,
            format!("type id {:?} must match [a-z0-9-]+", i.type_id),
        ));
    }
    let lat = i.latitude.value();
    if !(-90.0..=90.0).contains(&lat) {
        out.push(Violation::new(
            ViolationCode::LatRange,
            format!("latitude {} outside [-90, 90]", i.latitude),
        ));
    }
    let lon = i.longitude.value();
    if !(-180.0..=180.0).contains(&lon) {
        out.push(Violation::new(
            ViolationCode::LonRange,
            format!("longitude {} outside [-180, 180]", i.longitude),
        ));
    }
    let foi = &i.feature_of_interest;
    if !is_slug(&foi.to_ascii_lowercase()) && Iri::new(foi.as_str()).is_err() {
        out.push(Violation::new(
            ViolationCode::BadFoi,
            format!(
                "feature of interest {:?} is neither an absolute IRI nor a slug",
                i.feature_of_interest
            ),
        ));
    }

    let mut bound: BTreeMap<&Iri, usize> = BTreeMap::new();
    for b in &i.bindings {
        *bound.entry(&b.property).or_default() += 1;
    }
    let expected: BTreeSet<&Iri> = t.observes.iter().map(|p| &p.iri).collect();
    let missing: Vec<&str> = expected
        .iter()
        .filter(|p| !bound.contains_key(*p))
        .map(|p| p.as_str())
        .collect();
    let extra: Vec<&str> = bound
        .keys()
        .filter(|p| !expected.contains(*p))
        .map(|p| p.as_str())
        .collect();
    let repeated: Vec<&str> = bound
        .iter()
        .filter(|(_, n)| **n > 1)
        .map(|(p, _)| p.as_str())
        .collect();
    if !missing.is_empty() || !extra.is_empty() || !repeated.is_empty() {
        let mut parts = Vec::new();
        if !missing.is_empty() {
            parts.push(format!("missing [{}]", missing.join(", ")));
        }
        if !extra.is_empty() {
            parts.push(format!("not observed by type {}: [{}]", t.id, extra.join(", ")));
        }
        if !repeated.is_empty() {
            parts.push(format!("bound more than once: [{}]", repeated.join(", ")));
        }
        out.push(Violation::new(
            ViolationCode::BindingMismatch,
            format!("bindings must cover exactly the type's properties; {}", parts.join("; ")),
        ));
    }

    let mut fields = BTreeSet::new();
    for b in &i.bindings {
        if !is_field_name(&b.xgsn_field) {
            out.push(Violation::new(
                ViolationCode::BadFieldName,
                format!("stream field {:?} must match [a-zA-Z][a-zA-Z0-9_]*", b.xgsn_field),
            ));
        }
        if !fields.insert(b.xgsn_field.as_str()) {
            out.push(Violation::new(
                ViolationCode::DupField,
                format!("stream field {:?} is bound more than once", b.xgsn_field),
            ));
        }
    }
    out
}

/// `[a-zA-Z][a-zA-Z0-9_]*`
pub fn is_field_name(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
