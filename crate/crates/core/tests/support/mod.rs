//! Generators and independent oracles shared by the integration suites.
//!
//! The oracles here deliberately avoid the library's own helpers: IRIs,
//! slugs and N-Triples lines are built from string templates.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use proptest::collection::vec;
use proptest::prelude::*;
use proptest::sample::subsequence;

use ssnforge_core::ontology::{
    Measurement, MeasurementCapability, ObservedProperty, PropertyBinding, SensorInstance,
    SensorType,
};
use ssnforge_core::query::{Filter, FilterOp, PatternTerm, Query, Selection, TriplePattern};
use ssnforge_core::rdf::{BlankNode, Graph, Iri, Literal, Subject, Term, Triple};

pub const BASE: &str = "http://example.org/oi/";
const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
const SSN: &str = "http://purl.oclc.org/NET/ssnx/ssn#";
const OIOT: &str = "http://openiot.eu/ontology/ns/";
const GEO: &str = "http://www.w3.org/2003/01/geo/wgs84_pos#";
const XSD_DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";

/// Observed properties, chosen so that some local names collide after
/// slugging and one has an empty local name.
pub const PROPERTY_POOL: &[&str] = &[
    "http://openiot.eu/ontology/ns/AirTemperature",
    "http://openiot.eu/ontology/ns/Humidity",
    "http://openiot.eu/ontology/ns/AtmosphericPressure",
    "http://example.org/other#airTemperature",
    "http://example.org/q/Wind_Speed",
    "urn:x:co2",
    "http://example.org/p/",
];

pub const UNIT_POOL: &[&str] = &[
    "http://qudt.org/vocab/unit#Kelvin",
    "http://qudt.org/vocab/unit#DegreeCelsius",
    "http://qudt.org/vocab/unit#Percent",
    "http://qudt.org/vocab/unit#Hertz",
    "http://example.org/units/Custom",
];

pub fn iri(s: &str) -> Iri {
    Iri::new(s).unwrap()
}

// ---------------------------------------------------------------------
// Generators

pub fn slug() -> impl Strategy<Value = String> {
    "[a-z0-9]{1,8}(-[a-z0-9]{1,4})?"
}

/// Free text for labels, owners and descriptions, including characters
/// that need escaping.
pub fn text() -> impl Strategy<Value = String> {
    prop_oneof![
        "[ -~]{0,16}",
        "\\PC{0,8}",
        Just("quote \" backslash \\ newline \n return \r".to_owned()),
    ]
}

fn decimal(allow_exponent: bool) -> impl Strategy<Value = String> {
    let exponent = if allow_exponent { "([eE][+-]?[0-9])?" } else { "" };
    proptest::string::string_regex(&format!("(0|[1-9][0-9]{{0,3}})(\\.[0-9]{{1,4}})?{exponent}"))
        .expect("valid regex")
}

fn measurement(positive: bool) -> impl Strategy<Value = Measurement> {
    (decimal(true), 0..UNIT_POOL.len())
        .prop_filter("frequency must be positive", move |(v, _)| {
            !positive || v.parse::<f64>().unwrap() > 0.0
        })
        .prop_map(|(v, u)| Measurement {
            value: v.parse().unwrap(),
            unit: iri(UNIT_POOL[u]),
        })
}

fn capability(property: Iri) -> impl Strategy<Value = MeasurementCapability> {
    (
        proptest::option::of(measurement(false)),
        proptest::option::of(measurement(true)),
    )
        .prop_map(move |(accuracy, frequency)| MeasurementCapability {
            property: property.clone(),
            accuracy,
            frequency,
        })
}

/// Valid sensor types.
pub fn sensor_type() -> impl Strategy<Value = SensorType> {
    let pool: Vec<usize> = (0..PROPERTY_POOL.len()).collect();
    (slug(), text(), subsequence(pool, 1..=4).prop_shuffle())
        .prop_flat_map(|(id, name, props)| {
            let observes: Vec<ObservedProperty> = props
                .iter()
                .map(|&p| ObservedProperty {
                    iri: iri(PROPERTY_POOL[p]),
                    label: None,
                })
                .collect();
            let caps: Vec<BoxedStrategy<Option<MeasurementCapability>>> = observes
                .iter()
                .map(|p| proptest::option::of(capability(p.iri.clone())).boxed())
                .collect();
            (Just(id), Just(name), Just(observes), caps)
        })
        .prop_map(|(id, name, observes, caps)| SensorType {
            id,
            name,
            observes,
            capabilities: caps.into_iter().flatten().collect(),
        })
}

fn coordinate(limit: u32) -> impl Strategy<Value = String> {
    (any::<bool>(), 0..limit, proptest::option::of("[0-9]{1,5}")).prop_map(|(neg, int, frac)| {
        let sign = if neg { "-" } else { "" };
        match frac {
            Some(f) => format!("{sign}{int}.{f}"),
            None => format!("{sign}{int}"),
        }
    })
}

fn feature_of_interest() -> impl Strategy<Value = String> {
    prop_oneof![
        slug(),
        Just("Crop-Growth".to_owned()),
        "http://example\\.org/fields/[a-z]{1,5}",
    ]
}

/// Valid instances of `t`, with bindings in any order.
pub fn sensor_instance(t: &SensorType) -> impl Strategy<Value = SensorInstance> {
    let type_id = t.id.clone();
    let properties: Vec<Iri> = t.observes.iter().map(|p| p.iri.clone()).collect();
    let n = properties.len();
    (
        slug(),
        text(),
        proptest::option::of(text()),
        proptest::option::of(text()),
        coordinate(90),
        coordinate(180),
        feature_of_interest(),
        vec(0..UNIT_POOL.len(), n),
        "[a-zA-Z][a-zA-Z0-9]{0,4}",
        Just(properties).prop_shuffle(),
    )
        .prop_map(
            move |(id, name, owner, description, lat, lon, foi, units, field, props)| {
                SensorInstance {
                    id,
                    name,
                    type_id: type_id.clone(),
                    owner,
                    description,
                    latitude: lat.parse().unwrap(),
                    longitude: lon.parse().unwrap(),
                    feature_of_interest: foi,
                    bindings: props
                        .into_iter()
                        .zip(units)
                        .enumerate()
                        .map(|(k, (property, u))| PropertyBinding {
                            property,
                            unit: iri(UNIT_POOL[u]),
                            xgsn_field: format!("{field}_{k}"),
                        })
                        .collect(),
                }
            },
        )
}

pub fn type_and_instance() -> impl Strategy<Value = (SensorType, SensorInstance)> {
    sensor_type().prop_flat_map(|t| {
        let instances = sensor_instance(&t);
        (Just(t), instances)
    })
}

fn literal() -> impl Strategy<Value = Literal> {
    prop_oneof![
        text().prop_map(Literal::string),
        (text(), "[a-z]{2}(-[A-Z]{2})?").prop_map(|(s, tag)| Literal::lang_tagged(s, tag).unwrap()),
        "-?[0-9]{1,4}"
            .prop_map(|n| Literal::typed(n, iri("http://www.w3.org/2001/XMLSchema#integer"))),
        decimal(true).prop_map(|d| Literal::typed(d, iri(XSD_DOUBLE))),
        prop_oneof![Just("true"), Just("false")]
            .prop_map(|b| Literal::typed(b, iri("http://www.w3.org/2001/XMLSchema#boolean"))),
        text().prop_map(|s| Literal::typed(s, iri("http://example.org/dt#custom"))),
    ]
}

fn any_iri() -> impl Strategy<Value = Iri> {
    prop_oneof![
        "http://example\\.org/[a-z]{1,4}".prop_map(|s| iri(&s)),
        "http://example\\.org/ns#[A-Za-z_][A-Za-z0-9_]{0,4}".prop_map(|s| iri(&s)),
        "urn:x:[a-z0-9]{1,4}".prop_map(|s| iri(&s)),
        (0..PROPERTY_POOL.len()).prop_map(|i| iri(PROPERTY_POOL[i])),
    ]
}

/// Arbitrary graphs with blank nodes and every literal form.
pub fn any_graph() -> impl Strategy<Value = Graph> {
    let subject = prop_oneof![
        3 => any_iri().prop_map(Subject::Iri),
        1 => "b[0-9]{1,2}".prop_map(|l| Subject::Blank(BlankNode::new(l).unwrap())),
    ];
    let object = prop_oneof![
        any_iri().prop_map(Term::Iri),
        "b[0-9]{1,2}".prop_map(|l| Term::Blank(BlankNode::new(l).unwrap())),
        literal().prop_map(Term::Literal),
    ];
    let triple = (subject, any_iri(), object).prop_map(|(s, p, o)| Triple::new(s, p, o));
    (vec(triple, 0..40), any::<bool>()).prop_map(|(triples, with_prefixes)| {
        let mut g: Graph = triples.into_iter().collect();
        if with_prefixes {
            g.add_prefix("ex", iri("http://example.org/")).unwrap();
            g.add_prefix("ns", iri("http://example.org/ns#")).unwrap();
            g.add_prefix("oiot", iri(OIOT)).unwrap();
        }
        g
    })
}

// ---------------------------------------------------------------------
// Mapping oracle

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn line(s: &str, p: &str, o: &str) -> String {
    format!("<{s}> <{p}> {o} .")
}

fn res(iri: &str) -> String {
    format!("<{iri}>")
}

fn double(lexical: &str) -> String {
    format!("{}^^<{XSD_DOUBLE}>", quote(lexical))
}

/// Lowercase alphanumeric runs joined by single dashes.
fn oracle_slug(text: &str) -> String {
    text.to_lowercase()
        .split(|c: char| !(c.is_ascii_lowercase() || c.is_ascii_digit()))
        .filter(|w| !w.is_empty())
        .collect::<Vec<_>>()
        .join("-")
}

fn oracle_local_name(iri: &str) -> &str {
    match iri.rfind(['#', '/']) {
        Some(i) => &iri[i + 1..],
        None => iri.split_once(':').map_or(iri, |(_, rest)| rest),
    }
}

/// Property IRI to minting slug, numbering collisions in observes order.
pub fn oracle_slugs(t: &SensorType) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    let mut used = BTreeSet::new();
    for p in &t.observes {
        let mut base = oracle_slug(oracle_local_name(p.iri.as_str()));
        if base.is_empty() {
            base = "property".into();
        }
        let mut candidate = base.clone();
        let mut k = 2;
        while used.contains(&candidate) {
            candidate = format!("{base}-{k}");
            k += 1;
        }
        used.insert(candidate.clone());
        out.insert(p.iri.as_str().to_owned(), candidate);
    }
    out
}

/// N-Triples lines the type rules produce, tagged by rule.
pub fn oracle_type_lines(t: &SensorType) -> Vec<(&'static str, String)> {
    let me = format!("{BASE}types/{}", t.id);
    let slugs = oracle_slugs(t);
    let mut out = vec![
        ("type", line(&me, RDF_TYPE, &res(&format!("{OIOT}SensorType")))),
        ("subclass", line(&me, &format!("{RDFS}subClassOf"), &res(&format!("{SSN}Sensor")))),
        ("label", line(&me, &format!("{RDFS}label"), &quote(&t.name))),
    ];
    for p in &t.observes {
        let pi = p.iri.as_str();
        out.push(("observes", line(&me, &format!("{SSN}observes"), &res(pi))));
        let Some(cap) = t.capabilities.iter().find(|c| c.property == p.iri) else {
            continue;
        };
        let slug = &slugs[pi];
        let c = format!("{BASE}cap/{}/{slug}", t.id);
        out.push(("has-capability", line(&me, &format!("{SSN}hasMeasurementCapability"), &res(&c))));
        out.push(("capability-type", line(&c, RDF_TYPE, &res(&format!("{SSN}MeasurementCapability")))));
        out.push(("capability-property", line(&c, &format!("{SSN}forProperty"), &res(pi))));
        for (segment, class, m) in [("accuracy", "Accuracy", &cap.accuracy), ("frequency", "Frequency", &cap.frequency)] {
            let Some(m) = m else { continue };
            let mi = format!("{BASE}m/{}/{slug}/{segment}", t.id);
            out.push(("has-measurement", line(&c, &format!("{SSN}hasMeasurementProperty"), &res(&mi))));
            out.push(("measurement-type", line(&mi, RDF_TYPE, &res(&format!("{SSN}{class}")))));
            out.push(("measurement-value", line(&mi, &format!("{OIOT}hasValue"), &double(m.value.lexical()))));
            out.push(("measurement-unit", line(&mi, &format!("{OIOT}hasUnit"), &res(m.unit.as_str()))));
        }
    }
    out
}

/// N-Triples lines the instance rules produce, tagged by rule.
pub fn oracle_instance_lines(i: &SensorInstance, t: &SensorType) -> Vec<(&'static str, String)> {
    let me = format!("{BASE}sensors/{}", i.id);
    let slugs = oracle_slugs(t);
    let foi_lower = i.feature_of_interest.to_lowercase();
    let foi = if !foi_lower.is_empty() && foi_lower.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-') {
        format!("{BASE}foi/{foi_lower}")
    } else {
        i.feature_of_interest.clone()
    };
    let mut out = vec![
        ("instance-type", line(&me, RDF_TYPE, &res(&format!("{BASE}types/{}", t.id)))),
        ("label", line(&me, &format!("{RDFS}label"), &quote(&i.name))),
    ];
    if let Some(d) = &i.description {
        out.push(("comment", line(&me, &format!("{RDFS}comment"), &quote(d))));
    }
    if let Some(o) = &i.owner {
        out.push(("owner", line(&me, &format!("{OIOT}hasOwner"), &quote(o))));
    }
    out.push(("lat", line(&me, &format!("{GEO}lat"), &double(i.latitude.lexical()))));
    out.push(("long", line(&me, &format!("{GEO}long"), &double(i.longitude.lexical()))));
    out.push(("foi-link", line(&me, &format!("{OIOT}hasFeatureOfInterest"), &res(&foi))));
    out.push(("foi-type", line(&foi, RDF_TYPE, &res(&format!("{SSN}FeatureOfInterest")))));
    for b in &i.bindings {
        let pi = b.property.as_str();
        let bi = format!("{BASE}bind/{}/{}", i.id, slugs[pi]);
        out.push(("observes", line(&me, &format!("{SSN}observes"), &res(pi))));
        out.push(("has-binding", line(&me, &format!("{OIOT}hasBinding"), &res(&bi))));
        out.push(("binding-property", line(&bi, &format!("{OIOT}forProperty"), &res(pi))));
        out.push(("binding-unit", line(&bi, &format!("{OIOT}hasUnit"), &res(b.unit.as_str()))));
        out.push(("binding-field", line(&bi, &format!("{OIOT}xgsnField"), &quote(&b.xgsn_field))));
    }
    out
}

/// The canonical N-Triples document for a set of oracle lines.
pub fn oracle_document(lines: &[(&'static str, String)]) -> String {
    let set: BTreeSet<&str> = lines.iter().map(|(_, l)| l.as_str()).collect();
    set.into_iter().map(|l| format!("{l}\n")).collect()
}

// ---------------------------------------------------------------------
// Query oracle

pub const QUERY_VARS: &[&str] = &["a", "b", "c", "d"];

fn small_iri(i: usize) -> Iri {
    iri(&format!("http://q.example/r{i}"))
}

fn small_predicate(i: usize) -> Iri {
    iri(&format!("http://q.example/p{i}"))
}

fn small_literal(i: usize) -> Literal {
    match i {
        0 => Literal::string("x"),
        1 => Literal::lang_tagged("x", "en").unwrap(),
        _ => Literal::typed("1", iri("http://www.w3.org/2001/XMLSchema#integer")),
    }
}

/// Filter operands: IRIs and literals (queries cannot name blank nodes).
fn filter_term() -> impl Strategy<Value = Term> {
    prop_oneof![
        2 => (0..5usize).prop_map(|i| Term::Iri(small_iri(i))),
        1 => (0..3usize).prop_map(|i| Term::Literal(small_literal(i))),
    ]
}

fn small_term() -> impl Strategy<Value = Term> {
    prop_oneof![
        4 => (0..5usize).prop_map(|i| Term::Iri(small_iri(i))),
        1 => Just(Term::Blank(BlankNode::new("n0").unwrap())),
        2 => (0..3usize).prop_map(|i| Term::Literal(small_literal(i))),
    ]
}

/// Graphs of up to 100 triples over a small vocabulary, so that joins hit.
pub fn query_graph() -> impl Strategy<Value = Graph> {
    let subject = prop_oneof![
        4 => (0..5usize).prop_map(|i| Subject::Iri(small_iri(i))),
        1 => Just(Subject::Blank(BlankNode::new("n0").unwrap())),
    ];
    let triple = (subject, 0..3usize, small_term())
        .prop_map(|(s, p, o)| Triple::new(s, small_predicate(p), o));
    vec(triple, 0..=100).prop_map(|t| t.into_iter().collect())
}

fn var() -> impl Strategy<Value = PatternTerm> {
    (0..QUERY_VARS.len()).prop_map(|i| PatternTerm::Var(QUERY_VARS[i].to_owned()))
}

fn pattern() -> impl Strategy<Value = TriplePattern> {
    let subject = prop_oneof![3 => var(), 1 => (0..5usize).prop_map(|i| PatternTerm::Iri(small_iri(i)))];
    let predicate = prop_oneof![1 => var(), 2 => (0..3usize).prop_map(|i| PatternTerm::Iri(small_predicate(i)))];
    let object = prop_oneof![
        3 => var(),
        1 => (0..5usize).prop_map(|i| PatternTerm::Iri(small_iri(i))),
        1 => (0..3usize).prop_map(|i| PatternTerm::Literal(small_literal(i))),
    ];
    (subject, predicate, object).prop_map(|(subject, predicate, object)| TriplePattern {
        subject,
        predicate,
        object,
    })
}

/// Queries with one to three patterns; patterns without variables get one
/// so that every query projects something.
pub fn query() -> impl Strategy<Value = Query> {
    vec(pattern(), 1..=3)
        .prop_map(|mut patterns| {
            if patterns.iter().all(|p| p.vars().next().is_none()) {
                patterns[0].subject = PatternTerm::Var("a".into());
            }
            patterns
        })
        .prop_flat_map(|patterns| {
            let used: Vec<String> = {
                let set: BTreeSet<&str> = patterns.iter().flat_map(TriplePattern::vars).collect();
                set.into_iter().map(str::to_owned).collect()
            };
            let selection = prop_oneof![
                Just(Selection::All),
                subsequence(used.clone(), 1..=used.len()).prop_map(Selection::Vars),
            ];
            let filter = (
                proptest::sample::select(used),
                any::<bool>(),
                filter_term(),
            )
                .prop_map(|(var, eq, value)| Filter {
                    var,
                    op: if eq { FilterOp::Eq } else { FilterOp::Ne },
                    value,
                });
            (Just(patterns), selection, vec(filter, 0..=2))
        })
        .prop_map(|(patterns, selection, filters)| {
            Query::new(BTreeMap::new(), selection, patterns, filters).unwrap()
        })
}

/// SPARQL text for a query built by [`query`].
pub fn query_text(q: &Query) -> String {
    let select = match q.selection() {
        Selection::All => "*".to_owned(),
        Selection::Vars(v) => v.iter().map(|v| format!("?{v}")).collect::<Vec<_>>().join(" "),
    };
    let mut body: Vec<String> = q.patterns().iter().map(ToString::to_string).collect();
    body = vec![body.join(" . ")];
    for f in q.filters() {
        let op = match f.op {
            FilterOp::Eq => "=",
            FilterOp::Ne => "!=",
        };
        body.push(format!("FILTER(?{} {op} {})", f.var, f.value));
    }
    format!("SELECT {select} WHERE {{ {} }}", body.join(" "))
}

/// Every term appearing anywhere in `g`.
fn universe(g: &Graph) -> Vec<Term> {
    let mut terms = BTreeSet::new();
    for t in g.triples() {
        terms.insert(Term::from(t.subject.clone()));
        terms.insert(Term::Iri(t.predicate.clone()));
        terms.insert(t.object.clone());
    }
    terms.into_iter().collect()
}

fn instantiate(p: &PatternTerm, assignment: &BTreeMap<&str, &Term>) -> Term {
    match p {
        PatternTerm::Var(v) => assignment[v.as_str()].clone(),
        PatternTerm::Iri(i) => Term::Iri(i.clone()),
        PatternTerm::Literal(l) => Term::Literal(l.clone()),
    }
}

/// Enumerates every assignment of graph terms to the query variables and
/// keeps those under which all patterns are graph triples and all filters
/// hold. Rows are projected to `(var, N-Triples term)` lists.
pub fn brute_force(q: &Query, g: &Graph) -> BTreeSet<Vec<(String, String)>> {
    let vars: Vec<&str> = {
        let set: BTreeSet<&str> = q.patterns().iter().flat_map(TriplePattern::vars).collect();
        set.into_iter().collect()
    };
    let projected = q.projected_vars();
    let terms = universe(g);
    let triples: BTreeSet<(Term, Term, Term)> = g
        .triples()
        .map(|t| (Term::from(t.subject.clone()), Term::Iri(t.predicate.clone()), t.object.clone()))
        .collect();
    let mut rows = BTreeSet::new();
    if terms.is_empty() {
        return rows;
    }
    let mut counter = vec![0usize; vars.len()];
    loop {
        let assignment: BTreeMap<&str, &Term> =
            vars.iter().zip(&counter).map(|(v, &i)| (*v, &terms[i])).collect();
        let matches = q.patterns().iter().all(|p| {
            triples.contains(&(
                instantiate(&p.subject, &assignment),
                instantiate(&p.predicate, &assignment),
                instantiate(&p.object, &assignment),
            ))
        });
        let passes = q.filters().iter().all(|f| {
            let bound = assignment[f.var.as_str()];
            match f.op {
                FilterOp::Eq => *bound == f.value,
                FilterOp::Ne => *bound != f.value,
            }
        });
        if matches && passes {
            rows.insert(
                projected
                    .iter()
                    .map(|v| (v.clone(), assignment[v.as_str()].to_string()))
                    .collect(),
            );
        }
        // Odometer increment.
        let mut k = 0;
        loop {
            if k == counter.len() {
                return rows;
            }
            counter[k] += 1;
            if counter[k] < terms.len() {
                break;
            }
            counter[k] = 0;
            k += 1;
        }
    }
}

// ---------------------------------------------------------------------
// Metadata configs

/// Keys and values exercising every escaped character.
pub fn metadata_entries() -> impl Strategy<Value = Vec<(String, String)>> {
    let key = "[A-Za-z0-9._=:\\\\-][A-Za-z0-9._=:#\\\\-]{0,11}";
    let value = prop_oneof![
        "[ -~]{0,20}",
        "\\PC{0,10}",
        Just("a=b:c\\d\nnext".to_owned()),
        "[=:\\\\\n ]{0,6}",
    ];
    vec((key, value), 0..20).prop_map(|pairs| {
        let mut seen = BTreeSet::new();
        pairs
            .into_iter()
            .filter(|(k, _)| seen.insert(k.clone()))
            .collect()
    })
}
