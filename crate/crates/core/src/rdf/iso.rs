use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{BlankNode, Graph, Subject, Term, Triple};

/// Upper bound on candidate assignments tried by the blank-node search.
const SEARCH_BUDGET: usize = 1_000_000;

/// Compares triple sets, treating blank nodes as existential: the graphs
/// are equal when some bijection between their blank nodes maps one onto
/// the other. Prefix maps are ignored. Literals compare by lexical form.
pub fn graph_equal(a: &Graph, b: &Graph) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.triples == b.triples {
        return true;
    }
    let (ground_a, blank_a): (Vec<&Triple>, Vec<&Triple>) = a.triples().partition(|t| is_ground(t));
    let (ground_b, blank_b): (Vec<&Triple>, Vec<&Triple>) = b.triples().partition(|t| is_ground(t));
    if ground_a != ground_b || blank_a.len() != blank_b.len() {
        return false;
    }

    let sig_a = signatures(&blank_a);
    let sig_b = signatures(&blank_b);
    if sig_a.len() != sig_b.len() {
        return false;
    }
    let mut classes_a: BTreeMap<&Vec<String>, usize> = BTreeMap::new();
    let mut classes_b: BTreeMap<&Vec<String>, usize> = BTreeMap::new();
    for sig in sig_a.values() {
        *classes_a.entry(sig).or_default() += 1;
    }
    for sig in sig_b.values() {
        *classes_b.entry(sig).or_default() += 1;
    }
    if classes_a != classes_b {
        return false;
    }

    // Most constrained first.
    let mut order: Vec<&BlankNode> = sig_a.keys().copied().collect();
    order.sort_by_key(|n| (classes_a[&sig_a[n]], n.label().to_owned()));

    let target: BTreeSet<&Triple> = blank_b.iter().copied().collect();
    let mut search = Search {
        order,
        sig_a: &sig_a,
        sig_b: &sig_b,
        blank_a: &blank_a,
        target: &target,
        mapping: HashMap::new(),
        used: BTreeSet::new(),
        budget: SEARCH_BUDGET,
    };
    search.extend(0)
}

fn is_ground(t: &Triple) -> bool {
    !matches!(t.subject, Subject::Blank(_)) && !matches!(t.object, Term::Blank(_))
}

/// Each blank node's incident edges, with other blank nodes anonymized.
fn signatures<'g>(triples: &[&'g Triple]) -> HashMap<&'g BlankNode, Vec<String>> {
    let mut sigs: HashMap<&BlankNode, Vec<String>> = HashMap::new();
    for t in triples {
        let object = match &t.object {
            Term::Blank(_) => "_".to_owned(),
            other => other.to_string(),
        };
        if let Subject::Blank(s) = &t.subject {
            sigs.entry(s).or_default().push(format!("s {} {}", t.predicate, object));
        }
        if let Term::Blank(o) = &t.object {
            let subject = match &t.subject {
                Subject::Blank(_) => "_".to_owned(),
                other => other.to_string(),
            };
            sigs.entry(o).or_default().push(format!("o {} {}", subject, t.predicate));
        }
    }
    for sig in sigs.values_mut() {
        sig.sort_unstable();
    }
    sigs
}

struct Search<'g, 's> {
    order: Vec<&'g BlankNode>,
    sig_a: &'s HashMap<&'g BlankNode, Vec<String>>,
    sig_b: &'s HashMap<&'g BlankNode, Vec<String>>,
    blank_a: &'s [&'g Triple],
    target: &'s BTreeSet<&'g Triple>,
    mapping: HashMap<&'g BlankNode, &'g BlankNode>,
    used: BTreeSet<&'g BlankNode>,
    budget: usize,
}

impl<'g> Search<'g, '_> {
    fn extend(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let node = self.order[depth];
        let wanted = &self.sig_a[node];
        let mut candidates: Vec<&'g BlankNode> = self
            .sig_b
            .iter()
            .filter(|(c, sig)| *sig == wanted && !self.used.contains(*c))
            .map(|(c, _)| *c)
            .collect();
        candidates.sort();
        for candidate in candidates {
            if self.budget == 0 {
                return false;
            }
            self.budget -= 1;
            self.mapping.insert(node, candidate);
            self.used.insert(candidate);
            if self.consistent(node) && self.extend(depth + 1) {
                return true;
            }
            self.mapping.remove(node);
            self.used.remove(candidate);
        }
        false
    }

    /// Checks every triple touching `node` whose blank nodes are all mapped.
    fn consistent(&self, node: &BlankNode) -> bool {
        for t in self.blank_a {
            let touches = matches!(&t.subject, Subject::Blank(s) if s == node)
                || matches!(&t.object, Term::Blank(o) if o == node);
            if !touches {
                continue;
            }
            let subject = match &t.subject {
                Subject::Blank(s) => match self.mapping.get(s) {
                    Some(m) => Subject::Blank((*m).clone()),
                    None => continue,
                },
                other => other.clone(),
            };
            let object = match &t.object {
                Term::Blank(o) => match self.mapping.get(o) {
                    Some(m) => Term::Blank((*m).clone()),
                    None => continue,
                },
                other => other.clone(),
            };
            let image = Triple {
                subject,
                predicate: t.predicate.clone(),
                object,
            };
            if !self.target.contains(&image) {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{Iri, Literal, XSD_INTEGER};

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    fn bn(s: &str) -> BlankNode {
        BlankNode::new(s).unwrap()
    }

    #[test]
    fn empty_graphs_equal() {
        assert!(graph_equal(&Graph::new(), &Graph::new()));
    }

    #[test]
    fn lexical_forms_are_compared_not_values() {
        let dt = iri(XSD_INTEGER);
        let a: Graph = [Triple::new(iri("http://a/s"), iri("http://a/p"), Literal::typed("1", dt.clone()))]
            .into_iter()
            .collect();
        let b: Graph = [Triple::new(iri("http://a/s"), iri("http://a/p"), Literal::typed("01", dt))]
            .into_iter()
            .collect();
        assert!(!graph_equal(&a, &b));
    }

    #[test]
    fn blank_node_relabelling() {
        let p = iri("http://a/p");
        let q = iri("http://a/q");
        let a: Graph = [
            Triple::new(bn("x"), p.clone(), bn("y")),
            Triple::new(bn("y"), q.clone(), Literal::string("1")),
            Triple::new(iri("http://a/s"), p.clone(), bn("x")),
        ]
        .into_iter()
        .collect();
        let b: Graph = [
            Triple::new(bn("n2"), p.clone(), bn("n1")),
            Triple::new(bn("n1"), q.clone(), Literal::string("1")),
            Triple::new(iri("http://a/s"), p.clone(), bn("n2")),
        ]
        .into_iter()
        .collect();
        assert!(graph_equal(&a, &b));

        let c: Graph = [
            Triple::new(bn("n2"), p.clone(), bn("n1")),
            Triple::new(bn("n2"), q, Literal::string("1")),
            Triple::new(iri("http://a/s"), p, bn("n2")),
        ]
        .into_iter()
        .collect();
        assert!(!graph_equal(&a, &c));
    }

    #[test]
    fn symmetric_cycle_needs_backtracking() {
        // Two 2-cycles vs one 4-cycle: identical local signatures.
        let p = iri("http://a/p");
        let two_cycles: Graph = [("a", "b"), ("b", "a"), ("c", "d"), ("d", "c")]
            .iter()
            .map(|(s, o)| Triple::new(bn(s), p.clone(), bn(o)))
            .collect();
        let four_cycle: Graph = [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]
            .iter()
            .map(|(s, o)| Triple::new(bn(s), p.clone(), bn(o)))
            .collect();
        let renamed: Graph = [("w", "z"), ("z", "w"), ("x", "y"), ("y", "x")]
            .iter()
            .map(|(s, o)| Triple::new(bn(s), p.clone(), bn(o)))
            .collect();
        assert!(!graph_equal(&two_cycles, &four_cycle));
        assert!(graph_equal(&two_cycles, &renamed));
    }
}
