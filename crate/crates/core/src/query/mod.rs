//! A SPARQL subset: `PREFIX` declarations, `SELECT` over a basic graph
//! pattern of one to eight triple patterns, and `FILTER(?v = term)` /
//! `FILTER(?v != term)` constraints.
//!
//! Results use set semantics and are sorted, so equal inputs always give
//! byte-identical output.

mod eval;
mod parser;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::rdf::{Iri, Literal, RdfError, Term, XSD_STRING};

pub use eval::{evaluate, TripleSource};
pub use parser::parse_query;

pub const MAX_PATTERNS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("undefined prefix {0:?}")]
    UndefinedPrefix(String),
    #[error("invalid query: {0}")]
    Validation(String),
}

impl From<RdfError> for QueryError {
    fn from(e: RdfError) -> Self {
        match e {
            RdfError::Syntax {
                line,
                column,
                message,
            } => QueryError::Syntax {
                line,
                column,
                message,
            },
            RdfError::UndefinedPrefix(p) => QueryError::UndefinedPrefix(p),
            other => QueryError::Validation(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternTerm {
    Var(String),
    Iri(Iri),
    Literal(Literal),
}

impl PatternTerm {
    pub fn var(&self) -> Option<&str> {
        match self {
            PatternTerm::Var(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Var(v) => write!(f, "?{v}"),
            PatternTerm::Iri(iri) => write!(f, "<{iri}>"),
            PatternTerm::Literal(l) => l.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn vars(&self) -> impl Iterator<Item = &str> {
        [&self.subject, &self.predicate, &self.object]
            .into_iter()
            .filter_map(PatternTerm::var)
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.predicate, self.object)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selection {
    All,
    Vars(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterOp {
    Eq,
    Ne,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filter {
    pub var: String,
    pub op: FilterOp,
    pub value: Term,
}

impl Filter {
    pub fn accepts(&self, bound: &Term) -> bool {
        match self.op {
            FilterOp::Eq => bound == &self.value,
            FilterOp::Ne => bound != &self.value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    prefixes: BTreeMap<String, Iri>,
    selection: Selection,
    patterns: Vec<TriplePattern>,
    filters: Vec<Filter>,
}

impl Query {
    /// Checks the structural rules: one to eight patterns, predicates are
    /// variables or IRIs, and every selected or filtered variable occurs in
    /// some pattern.
    pub fn new(
        prefixes: BTreeMap<String, Iri>,
        selection: Selection,
        patterns: Vec<TriplePattern>,
        filters: Vec<Filter>,
    ) -> Result<Self, QueryError> {
        if patterns.is_empty() {
            return Err(QueryError::Validation(
                "WHERE needs at least one triple pattern".into(),
            ));
        }
        if patterns.len() > MAX_PATTERNS {
            return Err(QueryError::Validation(format!(
                "at most {MAX_PATTERNS} triple patterns are supported, got {}",
                patterns.len()
            )));
        }
        if let Some(p) = patterns
            .iter()
            .find(|p| matches!(p.predicate, PatternTerm::Literal(_)))
        {
            return Err(QueryError::Validation(format!(
                "literal in predicate position: {p}"
            )));
        }
        let bound: BTreeSet<&str> = patterns.iter().flat_map(TriplePattern::vars).collect();
        if let Selection::Vars(vars) = &selection {
            if vars.is_empty() {
                return Err(QueryError::Validation("SELECT needs at least one variable".into()));
            }
            if let Some(v) = vars.iter().find(|v| !bound.contains(v.as_str())) {
                return Err(QueryError::Validation(format!(
                    "selected variable ?{v} does not occur in any pattern"
                )));
            }
        }
        if let Some(f) = filters.iter().find(|f| !bound.contains(f.var.as_str())) {
            return Err(QueryError::Validation(format!(
                "filtered variable ?{} does not occur in any pattern",
                f.var
            )));
        }
        Ok(Query {
            prefixes,
            selection,
            patterns,
            filters,
        })
    }

    pub fn prefixes(&self) -> &BTreeMap<String, Iri> {
        &self.prefixes
    }

    pub fn selection(&self) -> &Selection {
        &self.selection
    }

    pub fn patterns(&self) -> &[TriplePattern] {
        &self.patterns
    }

    pub fn filters(&self) -> &[Filter] {
        &self.filters
    }

    /// Result columns: the selected variables, or for `*` every pattern
    /// variable in order of first appearance.
    pub fn projected_vars(&self) -> Vec<String> {
        match &self.selection {
            Selection::Vars(vars) => {
                let mut seen = BTreeSet::new();
                vars.iter().filter(|v| seen.insert(*v)).cloned().collect()
            }
            Selection::All => {
                let mut seen = BTreeSet::new();
                self.patterns
                    .iter()
                    .flat_map(TriplePattern::vars)
                    .filter(|v| seen.insert(*v))
                    .map(str::to_owned)
                    .collect()
            }
        }
    }
}

pub type Row = BTreeMap<String, Term>;

/// Query solutions: deduplicated and sorted by the N-Triples form of the
/// projected terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BindingSet {
    pub vars: Vec<String>,
    pub rows: Vec<Row>,
}

impl BindingSet {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The values bound to `var`, in row order.
    pub fn column(&self, var: &str) -> Vec<&Term> {
        self.rows.iter().filter_map(|r| r.get(var)).collect()
    }
}

impl Serialize for BindingSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        struct JsonRow<'a>(&'a [String], &'a Row);
        impl Serialize for JsonRow<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let mut map = serializer.serialize_map(Some(self.0.len()))?;
                for var in self.0 {
                    if let Some(term) = self.1.get(var) {
                        map.serialize_entry(var, &JsonTerm(term))?;
                    }
                }
                map.end()
            }
        }
        let rows: Vec<JsonRow<'_>> = self.rows.iter().map(|r| JsonRow(&self.vars, r)).collect();
        let mut s = serializer.serialize_struct("BindingSet", 2)?;
        s.serialize_field("vars", &self.vars)?;
        s.serialize_field("rows", &rows)?;
        s.end()
    }
}

struct JsonTerm<'a>(&'a Term);

impl Serialize for JsonTerm<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(None)?;
        match self.0 {
            Term::Iri(iri) => {
                map.serialize_entry("type", "iri")?;
                map.serialize_entry("value", iri.as_str())?;
            }
            Term::Blank(b) => {
                map.serialize_entry("type", "bnode")?;
                map.serialize_entry("value", b.label())?;
            }
            Term::Literal(l) => {
                map.serialize_entry("type", "literal")?;
                map.serialize_entry("value", l.lexical())?;
                if let Some(lang) = l.language() {
                    map.serialize_entry("lang", lang)?;
                } else if l.datatype().as_str() != XSD_STRING {
                    map.serialize_entry("datatype", l.datatype().as_str())?;
                }
            }
        }
        map.end()
    }
}
