use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rdf::Iri;

/// A decimal number that remembers the text it was written with.
///
/// The lexical form follows the JSON number grammar, which is also a valid
/// `xsd:double` lexical form, so values pass through JSON and RDF without
/// reformatting. The one normalization is the exponent, which is always
/// stored as `e` followed by an explicit sign (`1E5` becomes `1e+5`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Decimal(String);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid decimal number {0:?}")]
pub struct InvalidDecimal(pub String);

impl Decimal {
    pub fn lexical(&self) -> &str {
        &self.0
    }

    pub fn value(&self) -> f64 {
        // The grammar check in `from_str` guarantees this parses.
        self.0.parse().unwrap_or(f64::NAN)
    }
}

impl FromStr for Decimal {
    type Err = InvalidDecimal;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if is_json_number(s) && s.parse::<f64>().is_ok_and(f64::is_finite) {
            Ok(Decimal(normalize_exponent(s)))
        } else {
            Err(InvalidDecimal(s.to_owned()))
        }
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn normalize_exponent(s: &str) -> String {
    match s.find(['e', 'E']) {
        Some(i) => {
            let (mantissa, exponent) = (&s[..i], &s[i + 1..]);
            if exponent.starts_with(['+', '-']) {
                format!("{mantissa}e{exponent}")
            } else {
                format!("{mantissa}e+{exponent}")
            }
        }
        None => s.to_owned(),
    }
}

/// `-?(0|[1-9][0-9]*)(\.[0-9]+)?([eE][+-]?[0-9]+)?`
fn is_json_number(s: &str) -> bool {
    let b = s.as_bytes();
    let mut i = 0;
    if b.get(i) == Some(&b'-') {
        i += 1;
    }
    match b.get(i) {
        Some(b'0') => i += 1,
        Some(b'1'..=b'9') => {
            while b.get(i).is_some_and(u8::is_ascii_digit) {
                i += 1;
            }
        }
        _ => return false,
    }
    if b.get(i) == Some(&b'.') {
        i += 1;
        let start = i;
        while b.get(i).is_some_and(u8::is_ascii_digit) {
            i += 1;
        }
        if i == start {
            return false;
        }
    }
    if matches!(b.get(i), Some(b'e' | b'E')) {
        i += 1;
        if matches!(b.get(i), Some(b'+' | b'-')) {
            i += 1;
        }
        let start = i;
        while b.get(i).is_some_and(u8::is_ascii_digit) {
            i += 1;
        }
        if i == start {
            return false;
        }
    }
    i == b.len()
}

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let number = serde_json::Number::from_str(&self.0).map_err(serde::ser::Error::custom)?;
        number.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(serde_json::Number),
            Text(String),
        }
        let text = match Raw::deserialize(deserializer)? {
            Raw::Number(n) => n.to_string(),
            Raw::Text(s) => s,
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservedProperty {
    pub iri: Iri,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// A measured value with its unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measurement {
    pub value: Decimal,
    pub unit: Iri,
}

/// Accuracy and frequency of a sensor type for one observed property.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementCapability {
    pub property: Iri,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<Measurement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency: Option<Measurement>,
}

impl MeasurementCapability {
    pub fn for_property(&self, property: &Iri) -> bool {
        &self.property == property
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensorType {
    pub id: String,
    pub name: String,
    pub observes: Vec<ObservedProperty>,
    #[serde(default)]
    pub capabilities: Vec<MeasurementCapability>,
}

impl SensorType {
    pub fn capability(&self, property: &Iri) -> Option<&MeasurementCapability> {
        self.capabilities.iter().find(|c| c.for_property(property))
    }

    pub fn observes_property(&self, property: &Iri) -> bool {
        self.observes.iter().any(|p| &p.iri == property)
    }
}

/// Unit and X-GSN stream field for one observed property of an instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyBinding {
    pub property: Iri,
    pub unit: Iri,
    #[serde(rename = "xgsnField")]
    pub xgsn_field: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SensorInstance {
    pub id: String,
    pub name: String,
    pub type_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub owner: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub latitude: Decimal,
    pub longitude: Decimal,
    /// Either an absolute IRI or a slug minted under the `foi/` segment.
    pub feature_of_interest: String,
    pub bindings: Vec<PropertyBinding>,
}
