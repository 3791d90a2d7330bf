use std::collections::BTreeMap;

use crate::rdf::lexer::Cursor;
use crate::rdf::{Iri, Literal, Term, RDF_TYPE, XSD_BOOLEAN};

use super::{Filter, FilterOp, PatternTerm, Query, QueryError, Selection, TriplePattern};

/// Parses
///
/// ```text
/// (PREFIX p: <iri>)* SELECT (?v+ | *) WHERE { tp (. tp)* .? (FILTER(?v (=|!=) term))* }
/// ```
///
/// Keywords are case-insensitive, `WHERE` is optional and `a` abbreviates
/// `rdf:type` in predicate position.
pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    let mut p = QueryParser {
        cursor: Cursor::new(text),
        prefixes: BTreeMap::new(),
        base: None,
    };
    p.query()
}

struct QueryParser<'a> {
    cursor: Cursor<'a>,
    prefixes: BTreeMap<String, Iri>,
    base: Option<String>,
}

impl QueryParser<'_> {
    fn ws(&mut self) {
        self.cursor.skip_whitespace_and_comments();
    }

    fn syntax(&self, message: impl Into<String>) -> QueryError {
        self.cursor.error(message).into()
    }

    fn query(&mut self) -> Result<Query, QueryError> {
        loop {
            self.ws();
            if self.cursor.eat_keyword("PREFIX") {
                self.ws();
                let (line, column) = self.cursor.position();
                let (name, local) = self.cursor.read_prefixed_name()?;
                if !local.is_empty() {
                    return Err(QueryError::Syntax {
                        line,
                        column,
                        message: "expected prefix name ending in ':'".into(),
                    });
                }
                self.ws();
                let ns = self.iri_ref()?;
                self.prefixes.insert(name, ns);
            } else if self.cursor.eat_keyword("BASE") {
                self.ws();
                let base = self.iri_ref()?;
                self.base = Some(base.as_str().to_owned());
            } else {
                break;
            }
        }
        if !self.cursor.eat_keyword("SELECT") {
            return Err(self.syntax("expected PREFIX, BASE or SELECT"));
        }
        let selection = self.selection()?;
        self.ws();
        self.cursor.eat_keyword("WHERE");
        self.ws();
        self.cursor.expect('{', "'{' opening the graph pattern")?;
        let (patterns, filters) = self.body()?;
        self.ws();
        if !self.cursor.is_eof() {
            return Err(self.syntax("expected end of query after '}'"));
        }
        Query::new(std::mem::take(&mut self.prefixes), selection, patterns, filters)
    }

    fn selection(&mut self) -> Result<Selection, QueryError> {
        self.ws();
        if self.cursor.eat('*') {
            return Ok(Selection::All);
        }
        let mut vars = Vec::new();
        loop {
            self.ws();
            match self.cursor.peek() {
                Some('?' | '$') => vars.push(self.variable()?),
                _ if vars.is_empty() => return Err(self.syntax("expected variable or '*' after SELECT")),
                _ => return Ok(Selection::Vars(vars)),
            }
        }
    }

    fn body(&mut self) -> Result<(Vec<TriplePattern>, Vec<Filter>), QueryError> {
        let mut patterns = Vec::new();
        let mut filters = Vec::new();
        loop {
            self.ws();
            if self.cursor.eat('}') {
                return Ok((patterns, filters));
            }
            if self.cursor.eat_keyword("FILTER") {
                filters.push(self.filter()?);
                self.ws();
                self.cursor.eat('.');
                continue;
            }
            if !filters.is_empty() {
                return Err(self.syntax("expected FILTER or '}' after a FILTER"));
            }
            if self.cursor.is_eof() {
                return Err(self.syntax("expected '}' closing the graph pattern"));
            }
            patterns.push(self.pattern()?);
            self.ws();
            if !self.cursor.eat('.') && self.cursor.peek() != Some('}') && !self.at_filter() {
                return Err(self.syntax("expected '.', FILTER or '}' after triple pattern"));
            }
        }
    }

    fn at_filter(&self) -> bool {
        self.cursor
            .rest()
            .get(..6)
            .is_some_and(|s| s.eq_ignore_ascii_case("FILTER"))
    }

    fn pattern(&mut self) -> Result<TriplePattern, QueryError> {
        let subject = self.term("subject")?;
        self.ws();
        let predicate = if self.cursor.peek() == Some('a')
            && self.cursor.peek_nth(1).is_some_and(char::is_whitespace)
        {
            self.cursor.bump();
            PatternTerm::Iri(Iri::new(RDF_TYPE).expect("rdf:type"))
        } else {
            let (line, column) = self.cursor.position();
            let t = self.term("predicate")?;
            if matches!(t, PatternTerm::Literal(_)) {
                return Err(QueryError::Syntax {
                    line,
                    column,
                    message: "expected variable, IRI or 'a' as predicate".into(),
                });
            }
            t
        };
        self.ws();
        let object = self.term("object")?;
        Ok(TriplePattern {
            subject,
            predicate,
            object,
        })
    }

    fn filter(&mut self) -> Result<Filter, QueryError> {
        self.ws();
        self.cursor.expect('(', "'(' after FILTER")?;
        self.ws();
        if !matches!(self.cursor.peek(), Some('?' | '$')) {
            return Err(self.syntax("expected variable in FILTER"));
        }
        let var = self.variable()?;
        self.ws();
        let op = if self.cursor.eat('=') {
            FilterOp::Eq
        } else if self.cursor.peek() == Some('!') && self.cursor.peek_nth(1) == Some('=') {
            self.cursor.bump();
            self.cursor.bump();
            FilterOp::Ne
        } else {
            return Err(self.syntax("expected '=' or '!=' in FILTER"));
        };
        self.ws();
        let value = match self.term("FILTER operand")? {
            PatternTerm::Iri(iri) => Term::Iri(iri),
            PatternTerm::Literal(l) => Term::Literal(l),
            PatternTerm::Var(_) => return Err(self.syntax("expected IRI or literal as FILTER operand")),
        };
        self.ws();
        self.cursor.expect(')', "')' closing FILTER")?;
        Ok(Filter { var, op, value })
    }

    fn variable(&mut self) -> Result<String, QueryError> {
        self.cursor.bump();
        let mut name = String::new();
        while let Some(c) = self.cursor.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '_') {
            self.cursor.bump();
            name.push(c);
        }
        if name.is_empty() {
            return Err(self.syntax("expected variable name"));
        }
        Ok(name)
    }

    fn term(&mut self, position: &str) -> Result<PatternTerm, QueryError> {
        match self.cursor.peek() {
            Some('?' | '$') => Ok(PatternTerm::Var(self.variable()?)),
            Some('<') => Ok(PatternTerm::Iri(self.iri_ref()?)),
            Some('"' | '\'') => {
                let lexical = self.cursor.read_string()?;
                if self.cursor.eat('@') {
                    let tag = self.cursor.read_lang_tag()?;
                    return Ok(PatternTerm::Literal(Literal::lang_tagged(lexical, tag)?));
                }
                if self.cursor.peek() == Some('^') && self.cursor.peek_nth(1) == Some('^') {
                    self.cursor.bump();
                    self.cursor.bump();
                    let datatype = match self.cursor.peek() {
                        Some('<') => self.iri_ref()?,
                        _ => self.prefixed_name()?,
                    };
                    return Ok(PatternTerm::Literal(Literal::typed(lexical, datatype)));
                }
                Ok(PatternTerm::Literal(Literal::string(lexical)))
            }
            Some(c) if c.is_ascii_digit() || matches!(c, '+' | '-') => {
                let (lexical, datatype) = self.cursor.read_number()?;
                Ok(PatternTerm::Literal(Literal::typed(
                    lexical,
                    Iri::new(datatype).expect("xsd datatype"),
                )))
            }
            Some('_') if self.cursor.peek_nth(1) == Some(':') => {
                Err(self.syntax("blank nodes are not supported in queries; use a variable"))
            }
            Some(_) if self.cursor.eat_keyword("true") => Ok(boolean("true")),
            Some(_) if self.cursor.eat_keyword("false") => Ok(boolean("false")),
            Some(c) if c == ':' || c.is_ascii_alphabetic() => Ok(PatternTerm::Iri(self.prefixed_name()?)),
            _ => Err(self.syntax(format!(
                "expected variable, IRI, prefixed name or literal as {position}"
            ))),
        }
    }

    fn iri_ref(&mut self) -> Result<Iri, QueryError> {
        let (line, column) = self.cursor.position();
        let raw = self.cursor.read_iriref()?;
        let resolved = match &self.base {
            Some(base) if Iri::new(raw.as_str()).is_err() => format!("{base}{raw}"),
            _ => raw,
        };
        Iri::new(resolved).map_err(|e| QueryError::Syntax {
            line,
            column,
            message: format!("expected absolute IRI: {e}"),
        })
    }

    fn prefixed_name(&mut self) -> Result<Iri, QueryError> {
        let (line, column) = self.cursor.position();
        let (prefix, local) = self.cursor.read_prefixed_name()?;
        let ns = self
            .prefixes
            .get(&prefix)
            .ok_or(QueryError::UndefinedPrefix(prefix))?;
        Iri::new(format!("{ns}{local}")).map_err(|e| QueryError::Syntax {
            line,
            column,
            message: format!("expected prefixed name expanding to an IRI: {e}"),
        })
    }
}

fn boolean(value: &str) -> PatternTerm {
    PatternTerm::Literal(Literal::typed(value, Iri::new(XSD_BOOLEAN).expect("xsd:boolean")))
}
