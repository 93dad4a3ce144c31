//! Compound subclass pairs and the relational context around them.
//!
//! A pair `(subject, object)` is a compound pair when `subject P279 object`
//! holds and the object's label occurs inside the subject's label
//! ("red wine" / "wine"). For each pair the probe gathers the qualifiers on
//! the subclass statement, the subject's other statements and the subject's
//! siblings under the object, so that a curator can categorise the pair.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::store::{NodeId, OntologyStore, Qualifier, Statement, Value};
use crate::tsv;

/// Manually assigned relation type of a compound subclass pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InheritanceCategory {
    Purpose,
    Property,
    Location,
    Ownership,
    Material,
    Instance,
    Temporal,
}

impl InheritanceCategory {
    pub const ALL: [InheritanceCategory; 7] = [
        InheritanceCategory::Purpose,
        InheritanceCategory::Property,
        InheritanceCategory::Location,
        InheritanceCategory::Ownership,
        InheritanceCategory::Material,
        InheritanceCategory::Instance,
        InheritanceCategory::Temporal,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InheritanceCategory::Purpose => "PURPOSE",
            InheritanceCategory::Property => "PROPERTY",
            InheritanceCategory::Location => "LOCATION",
            InheritanceCategory::Ownership => "OWNERSHIP",
            InheritanceCategory::Material => "MATERIAL",
            InheritanceCategory::Instance => "INSTANCE",
            InheritanceCategory::Temporal => "TEMPORAL",
        }
    }
}

impl fmt::Display for InheritanceCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for InheritanceCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown inheritance category `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SuperstringOptions {
    /// Require the object label to appear as whole tokens of the subject
    /// label instead of any contiguous substring.
    pub whole_word: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SuperstringPairs {
    /// `(subject, object)` ordered by subject id, then object id.
    pub pairs: Vec<(NodeId, NodeId)>,
    /// Subclass edges skipped because either side has no label.
    pub unlabeled: usize,
}

fn normalize(label: &str) -> String {
    label.trim().to_lowercase()
}

fn contains_tokens(haystack: &str, needle: &str) -> bool {
    let hay: Vec<&str> = haystack.split_whitespace().collect();
    let pin: Vec<&str> = needle.split_whitespace().collect();
    !pin.is_empty() && hay.windows(pin.len()).any(|w| w == pin.as_slice())
}

/// Subclass pairs whose subject label strictly contains the object label.
pub fn superstring_pairs(store: &OntologyStore, options: SuperstringOptions) -> SuperstringPairs {
    let mut out = SuperstringPairs::default();
    let mut edges: Vec<(NodeId, NodeId)> = store
        .statements()
        .iter()
        .filter(|st| Some(st.property) == store.subclass_property())
        .filter_map(|st| st.object.as_node().map(|o| (st.subject, o)))
        .collect();
    edges.sort_unstable();
    edges.dedup();

    for (subject, object) in edges {
        let (Some(s), Some(o)) = (store.label(subject), store.label(object)) else {
            out.unlabeled += 1;
            continue;
        };
        let (s, o) = (normalize(s), normalize(o));
        if s == o || o.is_empty() {
            continue;
        }
        let hit = if options.whole_word {
            contains_tokens(&s, &o)
        } else {
            s.contains(&o)
        };
        if hit {
            out.pairs.push((subject, object));
        }
    }
    out
}

/// Relational context of one subclass pair.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub subject: NodeId,
    pub object: NodeId,
    /// Qualifiers on the `(subject, P279, object)` statement itself.
    pub qualifiers: Vec<Qualifier>,
    /// The subject's other statements, in file order.
    pub statements: Vec<Statement>,
    /// Other direct children of `object`.
    pub siblings: Vec<NodeId>,
    pub category: Option<InheritanceCategory>,
}

pub fn probe_pair(store: &OntologyStore, subject: NodeId, object: NodeId) -> Result<ProbeReport> {
    if subject.index() >= store.node_count() || object.index() >= store.node_count() {
        return Err(Error::UnknownNode(format!(
            "#{}",
            subject.index().max(object.index())
        )));
    }
    let edge =
        store
            .subclass_statement(subject, object)
            .ok_or_else(|| Error::MissingSubclassEdge {
                subject: store.external(subject).to_string(),
                object: store.external(object).to_string(),
            })?;
    let statements = store
        .statements_of(subject)
        .filter(|st| st.id != edge.id)
        .cloned()
        .collect();
    let siblings = store
        .subclasses_of(object)
        .iter()
        .copied()
        .filter(|&c| c != subject)
        .collect();
    Ok(ProbeReport {
        subject,
        object,
        qualifiers: edge.qualifiers.clone(),
        statements,
        siblings,
        category: None,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QualifierCoverage {
    pub total: usize,
    pub with_qualifier: usize,
    /// Qualifier property -> number of qualifiers using it.
    pub histogram: BTreeMap<NodeId, usize>,
}

pub fn qualifier_coverage(reports: &[ProbeReport]) -> QualifierCoverage {
    let mut cov = QualifierCoverage {
        total: reports.len(),
        ..Default::default()
    };
    for report in reports {
        if !report.qualifiers.is_empty() {
            cov.with_qualifier += 1;
        }
        for q in &report.qualifiers {
            *cov.histogram.entry(q.property).or_default() += 1;
        }
    }
    cov
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Annotation {
    pub subject: String,
    pub object: String,
    pub category: InheritanceCategory,
}

pub const ANNOTATION_HEADER: &str = "subject\tobject\tcategory";

/// Curator-supplied categories keyed by external `(subject, object)` ids.
#[derive(Clone, Debug, Default)]
pub struct Annotations {
    entries: Vec<Annotation>,
    index: BTreeMap<(String, String), InheritanceCategory>,
}

impl Annotations {
    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let mut out = Annotations::default();
        for (line_no, line) in tsv::read_rows(reader, ANNOTATION_HEADER)? {
            let parse_err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let [subject, object, category] = line.split('\t').collect::<Vec<_>>()[..] else {
                return Err(parse_err("expected 3 columns".into()));
            };
            let category = category
                .parse()
                .map_err(|e: Error| parse_err(e.to_string()))?;
            out.insert(Annotation {
                subject: subject.to_string(),
                object: object.to_string(),
                category,
            });
        }
        Ok(out)
    }

    pub fn insert(&mut self, annotation: Annotation) {
        self.index.insert(
            (annotation.subject.clone(), annotation.object.clone()),
            annotation.category,
        );
        self.entries.push(annotation);
    }

    pub fn get(&self, subject: &str, object: &str) -> Option<InheritanceCategory> {
        self.index
            .get(&(subject.to_string(), object.to_string()))
            .copied()
    }

    pub fn entries(&self) -> &[Annotation] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Fill `category` on every report that has an annotation.
    pub fn annotate(&self, store: &OntologyStore, reports: &mut [ProbeReport]) {
        for r in reports {
            r.category = self.get(store.external(r.subject), store.external(r.object));
        }
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{ANNOTATION_HEADER}")?;
        for a in &self.entries {
            writeln!(out, "{}\t{}\t{}", a.subject, a.object, a.category)?;
        }
        Ok(())
    }
}

fn value_text(store: &OntologyStore, value: &Value) -> String {
    match value {
        Value::Node(n) => store.display(*n).to_string(),
        Value::Literal(s) => s.clone(),
    }
}

fn or_dash(items: Vec<String>, sep: &str) -> String {
    if items.is_empty() {
        "-".to_string()
    } else {
        items.join(sep)
    }
}

pub const PROBE_HEADER: &str = "subject\tobject\tcategory\tqualifiers\tstatements\tsiblings";

/// Table-style export: one row per report, human-readable cells.
pub fn write_probe_reports<W: Write>(
    store: &OntologyStore,
    reports: &[ProbeReport],
    mut out: W,
) -> Result<()> {
    writeln!(out, "{PROBE_HEADER}")?;
    let node = |n: NodeId| format!("{} ({})", store.display(n), store.external(n));
    for r in reports {
        let qualifiers = r
            .qualifiers
            .iter()
            .map(|q| {
                format!(
                    "{}: {}",
                    store.display(q.property),
                    value_text(store, &q.value)
                )
            })
            .collect();
        let statements = r
            .statements
            .iter()
            .map(|st| {
                format!(
                    "{} - {} - {}",
                    store.display(st.subject),
                    store.display(st.property),
                    value_text(store, &st.object)
                )
            })
            .collect();
        let siblings = r
            .siblings
            .iter()
            .map(|&s| store.display(s).to_string())
            .collect();
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            node(r.subject),
            node(r.object),
            r.category.map_or("-", InheritanceCategory::as_str),
            or_dash(qualifiers, "; "),
            or_dash(statements, "; "),
            or_dash(siblings, ", ")
        )?;
    }
    Ok(())
}

pub const COVERAGE_HEADER: &str = "metric\tkey\tcount";

pub fn write_coverage<W: Write>(
    store: &OntologyStore,
    coverage: &QualifierCoverage,
    mut out: W,
) -> Result<()> {
    writeln!(out, "{COVERAGE_HEADER}")?;
    writeln!(out, "pairs\t-\t{}", coverage.total)?;
    writeln!(out, "with_qualifier\t-\t{}", coverage.with_qualifier)?;
    for (&p, count) in &coverage.histogram {
        writeln!(out, "qualifier_property\t{}\t{count}", store.external(p))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::parse_edge_file;

    fn small() -> OntologyStore {
        parse_edge_file(
            "id\tnode1\tlabel\tnode2\n\
             s1\tQ1827\tP279\tQ282\n\
             s2\tQ144\tP279\tQ39201\n\
             s3\tQ5\tP279\tQ282\n\
             s4\tQ6\tP279\tQ7\n\
             s5\tQ8\tP279\tQ9\n\
             l1\tQ1827\tlabel\tRed Wine\n\
             l2\tQ282\tlabel\twine\n\
             l3\tQ144\tlabel\tdog\n\
             l4\tQ39201\tlabel\tpet\n\
             l5\tQ5\tlabel\tWINE\n\
             l6\tQ6\tlabel\twinemaker\n\
             l7\tQ7\tlabel\twine\n"
                .as_bytes(),
        )
        .unwrap()
    }

    #[test]
    fn category_names_round_trip() {
        for c in InheritanceCategory::ALL {
            assert_eq!(c.as_str().parse::<InheritanceCategory>().unwrap(), c);
            assert!(c.as_str().chars().all(|ch| ch.is_ascii_uppercase()));
        }
        assert!("property".parse::<InheritanceCategory>().is_err());
    }

    #[test]
    fn keeps_red_wine_discards_dog_pet_and_equal_labels() {
        let s = small();
        let got = superstring_pairs(&s, SuperstringOptions::default());
        let names: Vec<(&str, &str)> = got
            .pairs
            .iter()
            .map(|&(a, b)| (s.external(a), s.external(b)))
            .collect();
        assert_eq!(names, [("Q6", "Q7"), ("Q1827", "Q282")]);
        assert_eq!(got.unlabeled, 1);
    }

    #[test]
    fn whole_word_is_stricter() {
        let s = small();
        let got = superstring_pairs(&s, SuperstringOptions { whole_word: true });
        assert_eq!(got.pairs.len(), 1);
        assert_eq!(s.external(got.pairs[0].0), "Q1827");
    }

    #[test]
    fn probe_requires_the_edge() {
        let s = small();
        let a = s.require("Q1827").unwrap();
        let b = s.require("Q39201").unwrap();
        match probe_pair(&s, a, b) {
            Err(Error::MissingSubclassEdge { subject, object }) => {
                assert_eq!((subject.as_str(), object.as_str()), ("Q1827", "Q39201"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn probe_siblings_exclude_subject() {
        let s = small();
        let red = s.require("Q1827").unwrap();
        let wine = s.require("Q282").unwrap();
        let r = probe_pair(&s, red, wine).unwrap();
        assert_eq!(r.siblings, vec![s.require("Q5").unwrap()]);
        assert!(r.qualifiers.is_empty());
        assert!(r.statements.is_empty());
    }

    #[test]
    fn coverage_of_one_bare_report() {
        let s = small();
        let r = probe_pair(&s, s.require("Q1827").unwrap(), s.require("Q282").unwrap()).unwrap();
        let cov = qualifier_coverage(&[r]);
        assert_eq!((cov.total, cov.with_qualifier), (1, 0));
        assert!(cov.histogram.is_empty());
    }

    #[test]
    fn annotations_parse_and_reject_unknown_categories() {
        let a = Annotations::parse("subject\tobject\tcategory\nQ1827\tQ282\tPROPERTY\n".as_bytes())
            .unwrap();
        assert_eq!(a.get("Q1827", "Q282"), Some(InheritanceCategory::Property));
        let bad = Annotations::parse("subject\tobject\tcategory\nQ1\tQ2\tCOLOUR\n".as_bytes());
        assert!(matches!(bad, Err(Error::Parse { line: 2, .. })));
        assert!(Annotations::parse("a\tb\n".as_bytes()).is_err());
    }
}
