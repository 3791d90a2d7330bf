//! Turtle subset: `@prefix`/`@base` (and their SPARQL-style spellings),
//! IRIs, prefixed names, blank node labels, the `a` keyword, `;`/`,`
//! lists and string, numeric and boolean literals.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::lexer::{is_valid_local_name, Cursor};
use super::{
    BlankNode, Graph, Iri, Literal, RdfError, Subject, Term, Triple, RDF_TYPE, XSD_BOOLEAN,
    XSD_STRING,
};

/// Sort key with a leading rank: IRIs before blank nodes for subjects, `a`
/// before other predicates.
type Key = (bool, String);

/// Writes `graph` as Turtle. Output is fully determined by the triple set
/// and prefix map.
pub fn serialize_turtle(graph: &Graph) -> String {
    let mut out = String::new();
    for (name, ns) in graph.prefixes() {
        let _ = writeln!(out, "@prefix {name}: <{ns}> .");
    }
    if graph.is_empty() {
        return out;
    }
    if !out.is_empty() {
        out.push('\n');
    }

    let compactor = Compactor::new(graph.prefixes());
    // subject -> predicate -> objects, each keyed by its written form.
    let mut blocks: BTreeMap<Key, BTreeMap<Key, Vec<String>>> = BTreeMap::new();
    for triple in graph.triples() {
        let subject = match &triple.subject {
            Subject::Iri(iri) => (false, compactor.iri(iri)),
            Subject::Blank(b) => (true, b.to_string()),
        };
        let predicate = if triple.predicate.as_str() == RDF_TYPE {
            (false, "a".to_owned())
        } else {
            (true, compactor.iri(&triple.predicate))
        };
        blocks
            .entry(subject)
            .or_default()
            .entry(predicate)
            .or_default()
            .push(compactor.term(&triple.object));
    }

    for (i, ((_, subject), predicates)) in blocks.into_iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&subject);
        let count = predicates.len();
        for (j, ((_, predicate), mut objects)) in predicates.into_iter().enumerate() {
            objects.sort();
            if j == 0 {
                out.push(' ');
            } else {
                out.push_str("    ");
            }
            out.push_str(&predicate);
            out.push(' ');
            out.push_str(&objects.join(" , "));
            out.push_str(if j + 1 == count { " .\n" } else { " ;\n" });
        }
    }
    out
}

struct Compactor<'a> {
    prefixes: &'a BTreeMap<String, Iri>,
}

impl<'a> Compactor<'a> {
    fn new(prefixes: &'a BTreeMap<String, Iri>) -> Self {
        Compactor { prefixes }
    }

    /// Longest matching namespace wins; ties go to the smallest short name.
    fn iri(&self, iri: &Iri) -> String {
        let mut best: Option<(&str, &str)> = None;
        for (name, ns) in self.prefixes {
            if let Some(local) = iri.as_str().strip_prefix(ns.as_str()) {
                if is_valid_local_name(local)
                    && best.is_none_or(|(_, l)| local.len() < l.len())
                {
                    best = Some((name, local));
                }
            }
        }
        match best {
            Some((name, local)) => format!("{name}:{local}"),
            None => format!("<{iri}>"),
        }
    }

    fn term(&self, term: &Term) -> String {
        match term {
            Term::Iri(iri) => self.iri(iri),
            Term::Blank(b) => b.to_string(),
            Term::Literal(l) => {
                let mut s = String::new();
                let _ = super::write_quoted(&mut s, l.lexical());
                if let Some(tag) = l.language() {
                    s.push('@');
                    s.push_str(tag);
                } else if l.datatype().as_str() != XSD_STRING {
                    s.push_str("^^");
                    s.push_str(&self.iri(l.datatype()));
                }
                s
            }
        }
    }
}

/// Parses a Turtle document into a graph, keeping its prefix map.
pub fn parse_turtle(doc: &str) -> Result<Graph, RdfError> {
    let mut parser = Parser {
        cursor: Cursor::new(doc),
        graph: Graph::new(),
        base: None,
    };
    parser.document()?;
    Ok(parser.graph)
}

struct Parser<'a> {
    cursor: Cursor<'a>,
    graph: Graph,
    base: Option<String>,
}

impl Parser<'_> {
    fn document(&mut self) -> Result<(), RdfError> {
        loop {
            self.cursor.skip_whitespace_and_comments();
            if self.cursor.is_eof() {
                return Ok(());
            }
            if self.cursor.eat_keyword("@prefix") {
                self.prefix_directive(true)?;
            } else if self.cursor.eat_keyword("@base") {
                self.base_directive(true)?;
            } else if self.cursor.eat_keyword("PREFIX") {
                self.prefix_directive(false)?;
            } else if self.cursor.eat_keyword("BASE") {
                self.base_directive(false)?;
            } else {
                self.triples()?;
                self.cursor.skip_whitespace_and_comments();
                self.cursor.expect('.', "'.' ending the statement")?;
            }
        }
    }

    fn prefix_directive(&mut self, dotted: bool) -> Result<(), RdfError> {
        self.cursor.skip_whitespace_and_comments();
        let (line, column) = self.cursor.position();
        let (name, local) = self.cursor.read_prefixed_name()?;
        if !local.is_empty() {
            return Err(RdfError::Syntax {
                line,
                column,
                message: "expected prefix name ending in ':'".into(),
            });
        }
        self.cursor.skip_whitespace_and_comments();
        let ns = self.iri_ref()?;
        self.graph.add_prefix(name, ns)?;
        if dotted {
            self.cursor.skip_whitespace_and_comments();
            self.cursor.expect('.', "'.' ending the @prefix directive")?;
        }
        Ok(())
    }

    fn base_directive(&mut self, dotted: bool) -> Result<(), RdfError> {
        self.cursor.skip_whitespace_and_comments();
        let base = self.iri_ref()?;
        self.base = Some(base.as_str().to_owned());
        if dotted {
            self.cursor.skip_whitespace_and_comments();
            self.cursor.expect('.', "'.' ending the @base directive")?;
        }
        Ok(())
    }

    fn triples(&mut self) -> Result<(), RdfError> {
        let subject = self.subject()?;
        loop {
            self.cursor.skip_whitespace_and_comments();
            let predicate = self.verb()?;
            loop {
                self.cursor.skip_whitespace_and_comments();
                let object = self.object()?;
                self.graph
                    .insert(Triple::new(subject.clone(), predicate.clone(), object));
                self.cursor.skip_whitespace_and_comments();
                if !self.cursor.eat(',') {
                    break;
                }
            }
            // Repeated or trailing ';' is allowed.
            let mut saw_semicolon = false;
            while self.cursor.eat(';') {
                saw_semicolon = true;
                self.cursor.skip_whitespace_and_comments();
            }
            if !saw_semicolon || matches!(self.cursor.peek(), Some('.') | None) {
                return Ok(());
            }
        }
    }

    fn subject(&mut self) -> Result<Subject, RdfError> {
        match self.cursor.peek() {
            Some('<') => Ok(Subject::Iri(self.iri_ref()?)),
            Some('_') if self.cursor.peek_nth(1) == Some(':') => Ok(Subject::Blank(self.blank()?)),
            Some(c) if c == ':' || c.is_ascii_alphabetic() => Ok(Subject::Iri(self.prefixed_name()?)),
            _ => Err(self
                .cursor
                .error("expected IRI, prefixed name or blank node as subject")),
        }
    }

    fn verb(&mut self) -> Result<Iri, RdfError> {
        if self.cursor.peek() == Some('a')
            && !self
                .cursor
                .peek_nth(1)
                .is_some_and(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | ':'))
        {
            self.cursor.bump();
            return Ok(Iri(RDF_TYPE.to_owned()));
        }
        match self.cursor.peek() {
            Some('<') => self.iri_ref(),
            Some(c) if c == ':' || c.is_ascii_alphabetic() => self.prefixed_name(),
            _ => Err(self
                .cursor
                .error("expected IRI, prefixed name or 'a' as predicate")),
        }
    }

    fn object(&mut self) -> Result<Term, RdfError> {
        match self.cursor.peek() {
            Some('<') => Ok(Term::Iri(self.iri_ref()?)),
            Some('_') if self.cursor.peek_nth(1) == Some(':') => Ok(Term::Blank(self.blank()?)),
            Some('"' | '\'') => Ok(Term::Literal(self.string_literal()?)),
            Some(c)
                if c.is_ascii_digit()
                    || matches!(c, '+' | '-')
                    || (c == '.' && self.cursor.peek_nth(1).is_some_and(|d| d.is_ascii_digit())) =>
            {
                let (lexical, dt) = self.cursor.read_number()?;
                Ok(Term::Literal(Literal::typed(lexical, Iri(dt.to_owned()))))
            }
            Some(_) if self.cursor.eat_keyword("true") => Ok(boolean("true")),
            Some(_) if self.cursor.eat_keyword("false") => Ok(boolean("false")),
            Some(c) if c == ':' || c.is_ascii_alphabetic() => Ok(Term::Iri(self.prefixed_name()?)),
            _ => Err(self.cursor.error(
                "expected IRI, prefixed name, blank node or literal as object",
            )),
        }
    }

    fn string_literal(&mut self) -> Result<Literal, RdfError> {
        let lexical = self.cursor.read_string()?;
        if self.cursor.eat('@') {
            let tag = self.cursor.read_lang_tag()?;
            return Literal::lang_tagged(lexical, tag);
        }
        if self.cursor.peek() == Some('^') && self.cursor.peek_nth(1) == Some('^') {
            self.cursor.bump();
            self.cursor.bump();
            let datatype = match self.cursor.peek() {
                Some('<') => self.iri_ref()?,
                _ => self.prefixed_name()?,
            };
            return Ok(Literal::typed(lexical, datatype));
        }
        Ok(Literal::string(lexical))
    }

    fn blank(&mut self) -> Result<BlankNode, RdfError> {
        self.cursor.bump();
        self.cursor.bump();
        let label = self.cursor.read_blank_label()?;
        Ok(BlankNode(label))
    }

    fn iri_ref(&mut self) -> Result<Iri, RdfError> {
        let (line, column) = self.cursor.position();
        let raw = self.cursor.read_iriref()?;
        let resolved = match &self.base {
            Some(base) if !super::is_valid_iri(&raw) => format!("{base}{raw}"),
            _ => raw,
        };
        Iri::new(resolved).map_err(|e| RdfError::Syntax {
            line,
            column,
            message: format!("expected absolute IRI: {e}"),
        })
    }

    fn prefixed_name(&mut self) -> Result<Iri, RdfError> {
        let (line, column) = self.cursor.position();
        let (prefix, local) = self.cursor.read_prefixed_name()?;
        let ns = self
            .graph
            .prefixes()
            .get(&prefix)
            .ok_or(RdfError::UndefinedPrefix(prefix))?;
        ns.join(&local).map_err(|e| RdfError::Syntax {
            line,
            column,
            message: format!("expected prefixed name expanding to an IRI: {e}"),
        })
    }
}

fn boolean(value: &str) -> Term {
    Term::Literal(Literal::typed(value, Iri(XSD_BOOLEAN.to_owned())))
}
