//! Deterministic mapping of sensor types and instances to RDF graphs.
//!
//! A type `T` becomes a subclass of `ssn:Sensor` that observes each of its
//! properties. A property with a measurement capability gets a capability
//! node `C`, and each accuracy or frequency on it gets a measurement node
//! `M` carrying a value and a unit:
//!
//! ```text
//! T a oiot:SensorType ; rdfs:subClassOf ssn:Sensor ; rdfs:label "name" ;
//!   ssn:observes P ; ssn:hasMeasurementCapability C .
//! C a ssn:MeasurementCapability ; ssn:forProperty P ;
//!   ssn:hasMeasurementProperty M .
//! M a ssn:Accuracy ; oiot:hasValue "v"^^xsd:double ; oiot:hasUnit U .
//! ```
//!
//! An instance `I` is typed by its sensor type and linked to its feature of
//! interest, its location and one binding node per observed property:
//!
//! ```text
//! I a T ; rdfs:label "name" ; rdfs:comment "description" ;
//!   oiot:hasOwner "owner" ; geo:lat "lat"^^xsd:double ;
//!   geo:long "long"^^xsd:double ; oiot:hasFeatureOfInterest F ;
//!   ssn:observes P ; oiot:hasBinding B .
//! F a ssn:FeatureOfInterest .
//! B oiot:forProperty P ; oiot:hasUnit U ; oiot:xgsnField "field" .
//! ```
//!
//! All nodes are minted IRIs, so the graphs contain no blank nodes and two
//! runs over equal input produce identical triple sets.

use std::collections::{BTreeMap, BTreeSet};

use crate::rdf::{Graph, Iri, Literal, Triple};

use super::namespaces::slugify;
use super::{
    mint_iri, validate_instance, validate_type, IriKind, Measurement, Namespaces, OntologyError,
    SensorInstance, SensorType,
};

/// Slug used for each observed property when minting capability,
/// measurement and binding IRIs: the slugified local name, with `-2`,
/// `-3`, ... appended (in `observes` order) when two properties collide.
pub fn property_slugs(t: &SensorType) -> BTreeMap<Iri, String> {
    let mut taken = BTreeSet::new();
    let mut slugs = BTreeMap::new();
    for p in &t.observes {
        if slugs.contains_key(&p.iri) {
            continue;
        }
        let mut base = slugify(p.iri.local_name());
        if base.is_empty() {
            base = "property".to_owned();
        }
        let mut slug = base.clone();
        let mut n = 2;
        while !taken.insert(slug.clone()) {
            slug = format!("{base}-{n}");
            n += 1;
        }
        slugs.insert(p.iri.clone(), slug);
    }
    slugs
}

pub fn type_iri(id: &str, ns: &Namespaces) -> Result<Iri, OntologyError> {
    mint_iri(IriKind::Type, &[id], ns)
}

pub fn instance_iri(id: &str, ns: &Namespaces) -> Result<Iri, OntologyError> {
    mint_iri(IriKind::Instance, &[id], ns)
}

pub fn type_to_graph(t: &SensorType, ns: &Namespaces) -> Result<Graph, OntologyError> {
    let violations = validate_type(t);
    if !violations.is_empty() {
        return Err(OntologyError::InvalidType(violations));
    }
    let rdf_type = ns.rdf("type");
    let this = type_iri(&t.id, ns)?;
    let slugs = property_slugs(t);
    let mut g = ns.empty_graph();

    g.insert(Triple::new(this.clone(), rdf_type.clone(), ns.oiot("SensorType")));
    g.insert(Triple::new(this.clone(), ns.rdfs("subClassOf"), ns.ssn("Sensor")));
    g.insert(Triple::new(this.clone(), ns.rdfs("label"), Literal::string(&t.name)));

    for property in &t.observes {
        let p = &property.iri;
        g.insert(Triple::new(this.clone(), ns.ssn("observes"), p.clone()));
        let Some(cap) = t.capability(p) else {
            continue;
        };
        let slug = &slugs[p];
        let cap_iri = mint_iri(IriKind::Capability, &[t.id.as_str(), slug], ns)?;
        g.insert(Triple::new(this.clone(), ns.ssn("hasMeasurementCapability"), cap_iri.clone()));
        g.insert(Triple::new(cap_iri.clone(), rdf_type.clone(), ns.ssn("MeasurementCapability")));
        g.insert(Triple::new(cap_iri.clone(), ns.ssn("forProperty"), p.clone()));

        let measurements: [(&str, &str, &Option<Measurement>); 2] = [
            ("accuracy", "Accuracy", &cap.accuracy),
            ("frequency", "Frequency", &cap.frequency),
        ];
        for (segment, class, measurement) in measurements {
            let Some(m) = measurement else {
                continue;
            };
            let m_iri = mint_iri(IriKind::Measurement, &[t.id.as_str(), slug, segment], ns)?;
            g.insert(Triple::new(cap_iri.clone(), ns.ssn("hasMeasurementProperty"), m_iri.clone()));
            g.insert(Triple::new(m_iri.clone(), rdf_type.clone(), ns.ssn(class)));
            g.insert(Triple::new(
                m_iri.clone(),
                ns.oiot("hasValue"),
                Literal::typed(m.value.lexical(), ns.xsd("double")),
            ));
            g.insert(Triple::new(m_iri, ns.oiot("hasUnit"), m.unit.clone()));
        }
    }
    Ok(g)
}

pub fn instance_to_graph(
    i: &SensorInstance,
    t: &SensorType,
    ns: &Namespaces,
) -> Result<Graph, OntologyError> {
    if i.type_id != t.id {
        return Err(OntologyError::TypeMismatch {
            instance_type: i.type_id.clone(),
            type_id: t.id.clone(),
        });
    }
    let violations = validate_instance(i, t);
    if !violations.is_empty() {
        return Err(OntologyError::InvalidInstance(violations));
    }
    let this = instance_iri(&i.id, ns)?;
    let foi = ns.feature_of_interest(&i.feature_of_interest)?;
    let slugs = property_slugs(t);
    let rdf_type = ns.rdf("type");
    let double = ns.xsd("double");
    let mut g = ns.empty_graph();

    g.insert(Triple::new(this.clone(), rdf_type.clone(), type_iri(&t.id, ns)?));
    g.insert(Triple::new(this.clone(), ns.rdfs("label"), Literal::string(&i.name)));
    if let Some(description) = &i.description {
        g.insert(Triple::new(this.clone(), ns.rdfs("comment"), Literal::string(description)));
    }
    if let Some(owner) = &i.owner {
        g.insert(Triple::new(this.clone(), ns.oiot("hasOwner"), Literal::string(owner)));
    }
    g.insert(Triple::new(
        this.clone(),
        ns.geo("lat"),
        Literal::typed(i.latitude.lexical(), double.clone()),
    ));
    g.insert(Triple::new(
        this.clone(),
        ns.geo("long"),
        Literal::typed(i.longitude.lexical(), double),
    ));
    g.insert(Triple::new(this.clone(), ns.oiot("hasFeatureOfInterest"), foi.clone()));
    g.insert(Triple::new(foi, rdf_type, ns.ssn("FeatureOfInterest")));

    for binding in &i.bindings {
        let p = &binding.property;
        let b_iri = mint_iri(IriKind::Binding, &[i.id.as_str(), &slugs[p]], ns)?;
        g.insert(Triple::new(this.clone(), ns.ssn("observes"), p.clone()));
        g.insert(Triple::new(this.clone(), ns.oiot("hasBinding"), b_iri.clone()));
        g.insert(Triple::new(b_iri.clone(), ns.oiot("forProperty"), p.clone()));
        g.insert(Triple::new(b_iri.clone(), ns.oiot("hasUnit"), binding.unit.clone()));
        g.insert(Triple::new(
            b_iri,
            ns.oiot("xgsnField"),
            Literal::string(&binding.xgsn_field),
        ));
    }
    Ok(g)
}
