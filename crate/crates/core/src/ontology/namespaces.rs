use std::fmt;

use crate::rdf::{Graph, Iri};

use super::OntologyError;

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const SSN: &str = "http://purl.oclc.org/NET/ssnx/ssn#";
pub const GEO: &str = "http://www.w3.org/2003/01/geo/wgs84_pos#";
pub const OIOT: &str = "http://openiot.eu/ontology/ns/";
pub const UNIT: &str = "http://qudt.org/vocab/unit#";

pub const DEFAULT_BASE_IRI: &str = "http://example.org/oi/";

/// Unit IRIs offered by the editors.
pub mod units {
    pub const KELVIN: &str = "http://qudt.org/vocab/unit#Kelvin";
    pub const DEGREE_CELSIUS: &str = "http://qudt.org/vocab/unit#DegreeCelsius";
    pub const PERCENT: &str = "http://qudt.org/vocab/unit#Percent";
    pub const HERTZ: &str = "http://qudt.org/vocab/unit#Hertz";

    pub const ALL: [&str; 4] = [KELVIN, DEGREE_CELSIUS, PERCENT, HERTZ];
}

/// Vocabulary namespaces plus the base under which type, instance and
/// auxiliary IRIs are minted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Namespaces {
    rdf: Iri,
    rdfs: Iri,
    xsd: Iri,
    ssn: Iri,
    geo: Iri,
    oiot: Iri,
    unit: Iri,
    base: Iri,
}

impl Namespaces {
    pub fn new(base: Iri) -> Result<Self, OntologyError> {
        if !base.as_str().ends_with(['/', '#']) {
            return Err(OntologyError::BadBaseIri(base.to_string()));
        }
        let fixed = |s: &str| Iri::new(s).expect("vocabulary namespace");
        Ok(Namespaces {
            rdf: fixed(RDF),
            rdfs: fixed(RDFS),
            xsd: fixed(XSD),
            ssn: fixed(SSN),
            geo: fixed(GEO),
            oiot: fixed(OIOT),
            unit: fixed(UNIT),
            base,
        })
    }

    pub fn base(&self) -> &Iri {
        &self.base
    }

    pub fn rdf(&self, local: &str) -> Iri {
        term(&self.rdf, local)
    }

    pub fn rdfs(&self, local: &str) -> Iri {
        term(&self.rdfs, local)
    }

    pub fn xsd(&self, local: &str) -> Iri {
        term(&self.xsd, local)
    }

    pub fn ssn(&self, local: &str) -> Iri {
        term(&self.ssn, local)
    }

    pub fn geo(&self, local: &str) -> Iri {
        term(&self.geo, local)
    }

    pub fn oiot(&self, local: &str) -> Iri {
        term(&self.oiot, local)
    }

    pub fn unit(&self, local: &str) -> Iri {
        term(&self.unit, local)
    }

    /// The vocabulary namespaces as `(prefix, namespace)` pairs.
    pub fn vocabularies(&self) -> [(&'static str, &Iri); 7] {
        [
            ("geo", &self.geo),
            ("oiot", &self.oiot),
            ("rdf", &self.rdf),
            ("rdfs", &self.rdfs),
            ("ssn", &self.ssn),
            ("unit", &self.unit),
            ("xsd", &self.xsd),
        ]
    }

    /// A graph carrying the standard prefix map and no triples.
    pub fn empty_graph(&self) -> Graph {
        let mut graph = Graph::new();
        for (name, ns) in self.vocabularies() {
            graph
                .add_prefix(name, ns.clone())
                .expect("vocabulary prefix names are valid");
        }
        graph
    }

    /// Resolves a feature of interest given either as an absolute IRI or as
    /// a slug.
    pub fn feature_of_interest(&self, value: &str) -> Result<Iri, OntologyError> {
        if is_slug(&value.to_ascii_lowercase()) {
            mint_iri(IriKind::FeatureOfInterest, &[value], self)
        } else {
            Iri::new(value).map_err(|_| OntologyError::BadFeatureOfInterest(value.to_owned()))
        }
    }
}

impl Default for Namespaces {
    fn default() -> Self {
        Namespaces::new(Iri::new(DEFAULT_BASE_IRI).expect("default base IRI")).expect("default base IRI")
    }
}

fn term(ns: &Iri, local: &str) -> Iri {
    ns.join(local).expect("vocabulary terms are valid IRIs")
}

/// What a minted IRI identifies; selects its path segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IriKind {
    Type,
    Instance,
    Capability,
    Measurement,
    Binding,
    FeatureOfInterest,
}

impl IriKind {
    pub fn segment(self) -> &'static str {
        match self {
            IriKind::Type => "types",
            IriKind::Instance => "sensors",
            IriKind::Capability => "cap",
            IriKind::Measurement => "m",
            IriKind::Binding => "bind",
            IriKind::FeatureOfInterest => "foi",
        }
    }
}

impl fmt::Display for IriKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.segment())
    }
}

/// `base + segment + "/" + parts.join("/")`, with each part lowercased and
/// required to be a slug.
pub fn mint_iri<S: AsRef<str>>(kind: IriKind, parts: &[S], ns: &Namespaces) -> Result<Iri, OntologyError> {
    let mut iri = format!("{}{}", ns.base(), kind.segment());
    if parts.is_empty() {
        return Err(OntologyError::BadSlug(String::new()));
    }
    for part in parts {
        let part = part.as_ref().to_ascii_lowercase();
        if !is_slug(&part) {
            return Err(OntologyError::BadSlug(part));
        }
        iri.push('/');
        iri.push_str(&part);
    }
    Iri::new(iri).map_err(|e| OntologyError::BadSlug(e.to_string()))
}

/// `[a-z0-9-]+`
pub fn is_slug(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-')
}

/// Turns arbitrary text (typically an IRI local name) into a slug.
pub fn slugify(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        let c = c.to_ascii_lowercase();
        if c.is_ascii_lowercase() || c.is_ascii_digit() {
            out.push(c);
        } else if !out.is_empty() && !out.ends_with('-') {
            out.push('-');
        }
    }
    while out.ends_with('-') {
        out.pop();
    }
    out
}
