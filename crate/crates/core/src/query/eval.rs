use std::collections::{BTreeMap, BTreeSet};

use crate::rdf::{Dataset, Graph, Subject, Term, Triple};

use super::{BindingSet, PatternTerm, Query, Row, TriplePattern};

/// Anything a query can run against.
pub trait TripleSource {
    /// Every distinct triple in scope.
    fn scope(&self) -> Vec<&Triple>;
}

impl TripleSource for Graph {
    fn scope(&self) -> Vec<&Triple> {
        self.triples().collect()
    }
}

/// A dataset is queried as the union of its named graphs.
impl TripleSource for Dataset {
    fn scope(&self) -> Vec<&Triple> {
        let unique: BTreeSet<&Triple> = self.graphs().flat_map(|(_, g)| g.triples()).collect();
        unique.into_iter().collect()
    }
}

/// Evaluates the basic graph pattern by nested-loop join, left to right,
/// then applies filters, projects, deduplicates and sorts.
pub fn evaluate<S: TripleSource + ?Sized>(query: &Query, source: &S) -> BindingSet {
    let triples = source.scope();
    let mut solutions: Vec<Row> = vec![Row::new()];
    for pattern in query.patterns() {
        let mut next = Vec::new();
        for solution in &solutions {
            for triple in &triples {
                if let Some(extended) = match_pattern(pattern, triple, solution) {
                    next.push(extended);
                }
            }
        }
        solutions = next;
        if solutions.is_empty() {
            break;
        }
    }

    let vars = query.projected_vars();
    let mut unique: BTreeMap<Vec<String>, Row> = BTreeMap::new();
    for solution in solutions {
        let keep = query
            .filters()
            .iter()
            .all(|f| solution.get(&f.var).is_some_and(|t| f.accepts(t)));
        if !keep {
            continue;
        }
        let row: Row = vars
            .iter()
            .filter_map(|v| solution.get(v).map(|t| (v.clone(), t.clone())))
            .collect();
        let key = vars
            .iter()
            .map(|v| row.get(v).map(ToString::to_string).unwrap_or_default())
            .collect();
        unique.entry(key).or_insert(row);
    }
    BindingSet {
        vars,
        rows: unique.into_values().collect(),
    }
}

fn match_pattern(pattern: &TriplePattern, triple: &Triple, solution: &Row) -> Option<Row> {
    // Cheap constant checks first.
    if !constant_matches_subject(&pattern.subject, &triple.subject)
        || !matches!(&pattern.predicate, PatternTerm::Var(_))
            && !matches!(&pattern.predicate, PatternTerm::Iri(i) if i == &triple.predicate)
        || !constant_matches_object(&pattern.object, &triple.object)
    {
        return None;
    }
    let mut row = solution.clone();
    let positions = [
        (&pattern.subject, Term::from(triple.subject.clone())),
        (&pattern.predicate, Term::Iri(triple.predicate.clone())),
        (&pattern.object, triple.object.clone()),
    ];
    for (pattern_term, value) in positions {
        if let PatternTerm::Var(v) = pattern_term {
            match row.get(v) {
                Some(bound) if bound != &value => return None,
                Some(_) => {}
                None => {
                    row.insert(v.clone(), value);
                }
            }
        }
    }
    Some(row)
}

fn constant_matches_subject(p: &PatternTerm, s: &Subject) -> bool {
    match (p, s) {
        (PatternTerm::Var(_), _) => true,
        (PatternTerm::Iri(a), Subject::Iri(b)) => a == b,
        _ => false,
    }
}

fn constant_matches_object(p: &PatternTerm, o: &Term) -> bool {
    match (p, o) {
        (PatternTerm::Var(_), _) => true,
        (PatternTerm::Iri(a), Term::Iri(b)) => a == b,
        (PatternTerm::Literal(a), Term::Literal(b)) => a == b,
        _ => false,
    }
}
