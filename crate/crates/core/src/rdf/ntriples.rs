//! Canonical line-based forms. Serializers emit one statement per line,
//! full IRIs, lines sorted bytewise and LF-terminated. Parsers accept any
//! line order, blank lines and `#` comments.

use super::lexer::Cursor;
use super::{BlankNode, Dataset, Graph, Iri, Literal, RdfError, Subject, Term, Triple};

pub fn serialize_ntriples(graph: &Graph) -> String {
    let mut lines: Vec<String> = graph.triples().map(|t| t.to_string()).collect();
    lines.sort_unstable();
    join_lines(lines)
}

pub fn serialize_nquads(dataset: &Dataset) -> String {
    let mut lines: Vec<String> = dataset
        .graphs()
        .flat_map(|(name, graph)| {
            graph.triples().map(move |t| {
                format!("{} <{}> {} <{}> .", t.subject, t.predicate, t.object, name)
            })
        })
        .collect();
    lines.sort_unstable();
    join_lines(lines)
}

fn join_lines(lines: Vec<String>) -> String {
    let mut out = String::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn parse_ntriples(doc: &str) -> Result<Graph, RdfError> {
    let mut graph = Graph::new();
    for (idx, line) in doc.lines().enumerate() {
        let mut cursor = Cursor::at_line(line, idx + 1);
        if let Some((triple, graph_name)) = statement(&mut cursor, false)? {
            debug_assert!(graph_name.is_none());
            graph.insert(triple);
        }
    }
    Ok(graph)
}

pub fn parse_nquads(doc: &str) -> Result<Dataset, RdfError> {
    let mut dataset = Dataset::new();
    for (idx, line) in doc.lines().enumerate() {
        let mut cursor = Cursor::at_line(line, idx + 1);
        if let Some((triple, Some(name))) = statement(&mut cursor, true)? {
            dataset.graph_mut_or_default(name).insert(triple);
        }
    }
    Ok(dataset)
}

/// Parses one line. Returns `None` for blank and comment-only lines.
fn statement(
    cursor: &mut Cursor<'_>,
    quads: bool,
) -> Result<Option<(Triple, Option<Iri>)>, RdfError> {
    cursor.skip_blanks();
    if cursor.is_eof() || cursor.peek() == Some('#') {
        return Ok(None);
    }
    let subject = match cursor.peek() {
        Some('<') => Subject::Iri(iri(cursor)?),
        Some('_') => Subject::Blank(blank(cursor)?),
        _ => return Err(cursor.error("expected IRI or blank node as subject")),
    };
    cursor.skip_blanks();
    if cursor.peek() != Some('<') {
        return Err(cursor.error("expected IRI as predicate"));
    }
    let predicate = iri(cursor)?;
    cursor.skip_blanks();
    let object = match cursor.peek() {
        Some('<') => Term::Iri(iri(cursor)?),
        Some('_') => Term::Blank(blank(cursor)?),
        Some('"') => Term::Literal(literal(cursor)?),
        _ => return Err(cursor.error("expected IRI, blank node or literal as object")),
    };
    cursor.skip_blanks();
    let graph_name = if quads {
        if cursor.peek() != Some('<') {
            return Err(cursor.error("expected graph IRI"));
        }
        let name = iri(cursor)?;
        cursor.skip_blanks();
        Some(name)
    } else {
        None
    };
    cursor.expect('.', "'.' ending the statement")?;
    cursor.skip_blanks();
    if !(cursor.is_eof() || cursor.peek() == Some('#')) {
        return Err(cursor.error("expected end of line"));
    }
    Ok(Some((Triple { subject, predicate, object }, graph_name)))
}

fn iri(cursor: &mut Cursor<'_>) -> Result<Iri, RdfError> {
    let (line, column) = cursor.position();
    let raw = cursor.read_iriref()?;
    Iri::new(raw).map_err(|e| RdfError::Syntax {
        line,
        column,
        message: format!("expected absolute IRI: {e}"),
    })
}

fn blank(cursor: &mut Cursor<'_>) -> Result<BlankNode, RdfError> {
    cursor.expect('_', "blank node")?;
    cursor.expect(':', "':' after '_'")?;
    Ok(BlankNode(cursor.read_blank_label()?))
}

fn literal(cursor: &mut Cursor<'_>) -> Result<Literal, RdfError> {
    let lexical = cursor.read_string()?;
    if cursor.eat('@') {
        let tag = cursor.read_lang_tag()?;
        return Literal::lang_tagged(lexical, tag);
    }
    if cursor.eat('^') {
        cursor.expect('^', "'^^' before datatype IRI")?;
        return Ok(Literal::typed(lexical, iri(cursor)?));
    }
    Ok(Literal::string(lexical))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    #[test]
    fn empty_inputs() {
        assert_eq!(serialize_ntriples(&Graph::new()), "");
        assert_eq!(serialize_nquads(&Dataset::new()), "");
        assert!(parse_ntriples("").unwrap().is_empty());
        assert!(parse_nquads("\n# only a comment\n").unwrap().is_empty());
    }

    #[test]
    fn single_triple_expands_fully() {
        let mut g = Graph::new();
        g.add_prefix("ex", iri("http://a/")).unwrap();
        g.insert(Triple::new(iri("http://a/s"), iri("http://a/p"), iri("http://a/o")));
        assert_eq!(
            serialize_ntriples(&g),
            "<http://a/s> <http://a/p> <http://a/o> .\n"
        );
    }

    #[test]
    fn single_quad() {
        let mut d = Dataset::new();
        let mut g = Graph::new();
        g.insert(Triple::new(iri("http://a/s"), iri("http://a/p"), Literal::string("v")));
        d.insert_graph(iri("http://a/g"), g);
        let text = serialize_nquads(&d);
        assert_eq!(text, "<http://a/s> <http://a/p> \"v\" <http://a/g> .\n");
        assert_eq!(parse_nquads(&text).unwrap(), d);
    }

    #[test]
    fn lines_sorted_and_any_order_accepted() {
        let doc = "<http://a/z> <http://a/p> \"1\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n\
                   _:b0 <http://a/p> \"x\"@en . # trailing comment\n\
                   <http://a/b> <http://a/p> _:b0 .\n";
        let g = parse_ntriples(doc).unwrap();
        assert_eq!(g.len(), 3);
        let canonical = serialize_ntriples(&g);
        let lines: Vec<&str> = canonical.lines().collect();
        let mut sorted = lines.clone();
        sorted.sort_unstable();
        assert_eq!(lines, sorted);
        assert_eq!(serialize_ntriples(&parse_ntriples(&canonical).unwrap()), canonical);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let doc = "<http://a/s> <http://a/p> <http://a/o> .\n<http://a/s> <http://a/p> .\n";
        assert!(matches!(
            parse_ntriples(doc),
            Err(RdfError::Syntax { line: 2, .. })
        ));
        // prefixed names are not N-Triples
        assert!(matches!(
            parse_ntriples("ex:s <http://a/p> <http://a/o> ."),
            Err(RdfError::Syntax { line: 1, column: 1, .. })
        ));
        // a quad without its graph term
        assert!(matches!(
            parse_nquads("<http://a/s> <http://a/p> <http://a/o> .\n"),
            Err(RdfError::Syntax { line: 1, .. })
        ));
        // truncated line
        assert!(matches!(
            parse_nquads("<http://a/s> <http://a/p> <http://a/o> <http://a/g> .\n<http://a/s> <http://a/p> \"tru"),
            Err(RdfError::Syntax { line: 2, .. })
        ));
    }
}
