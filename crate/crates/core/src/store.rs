//! Immutable, indexed view over a knowledge-graph edge file.
//!
//! The store recognises two structural properties: `P279` (subclass of),
//! which forms the class hierarchy, and `P31` (instance of), which attaches
//! entities to classes. Every other property is kept as a generic
//! statement, indexed by subject and by `(subject, property)`.
//!
//! Node identifiers are interned so that the numeric order of [`NodeId`]
//! follows the numeric part of the external identifier (`Q5` < `Q42`).
//! "Smaller id" tie-breaks elsewhere in the crate rely on this.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::error::{Error, Result};

pub const SUBCLASS_OF: &str = "P279";
pub const INSTANCE_OF: &str = "P31";

pub const EDGE_HEADER: &str = "id\tnode1\tlabel\tnode2";

/// Interned identifier of a Q-node or P-node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[cfg(test)]
    pub(crate) fn from_index(index: u32) -> Self {
        NodeId(index)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    Entity,
    Property,
}

/// Object of a statement or qualifier.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Node(NodeId),
    /// Strings, quantities, dates: anything that is not a node identifier.
    Literal(String),
}

impl Value {
    pub fn as_node(&self) -> Option<NodeId> {
        match self {
            Value::Node(id) => Some(*id),
            Value::Literal(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Qualifier {
    pub property: NodeId,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Statement {
    pub id: String,
    pub subject: NodeId,
    pub property: NodeId,
    pub object: Value,
    /// In input-file order.
    pub qualifiers: Vec<Qualifier>,
}

/// How subclass cycles are handled when the store is built.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CyclePolicy {
    /// Keep every edge; instance queries on a class inside a cycle fail.
    #[default]
    Error,
    /// Drop every subclass edge inside a cycle whose child has the larger
    /// numeric id, which leaves the hierarchy acyclic.
    Break,
}

impl FromStr for CyclePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "error" => Ok(CyclePolicy::Error),
            "break" => Ok(CyclePolicy::Break),
            other => Err(Error::InvalidArgument(format!(
                "unknown cycle policy `{other}` (expected error|break)"
            ))),
        }
    }
}

impl fmt::Display for CyclePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CyclePolicy::Error => "error",
            CyclePolicy::Break => "break",
        })
    }
}

/// Whether instance sets include instances of descendant classes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum InstanceMode {
    Direct,
    #[default]
    Transitive,
}

impl InstanceMode {
    pub fn as_str(self) -> &'static str {
        match self {
            InstanceMode::Direct => "direct",
            InstanceMode::Transitive => "transitive",
        }
    }
}

impl FromStr for InstanceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(InstanceMode::Direct),
            "transitive" => Ok(InstanceMode::Transitive),
            other => Err(Error::InvalidArgument(format!(
                "unknown instance mode `{other}` (expected direct|transitive)"
            ))),
        }
    }
}

impl fmt::Display for InstanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct StoreOptions {
    pub cycle_policy: CyclePolicy,
}

/// Row-level problems found while parsing. None of these abort the parse.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub rows: usize,
    /// Line numbers (1-based, header is line 1) of rows that were skipped.
    pub malformed_lines: Vec<usize>,
    /// Line numbers of qualifier rows whose statement id was never defined.
    pub dangling_qualifier_lines: Vec<usize>,
}

/// Members of one class's instance set, sorted by [`NodeId`].
#[derive(Clone, Copy, Debug)]
pub struct InstanceSet<'a> {
    pub class: NodeId,
    pub mode: InstanceMode,
    pub members: &'a [NodeId],
}

impl InstanceSet<'_> {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.members.binary_search(&node).is_ok()
    }
}

pub fn is_node_identifier(s: &str) -> bool {
    let bytes = s.as_bytes();
    bytes.len() >= 2 && matches!(bytes[0], b'P' | b'Q') && bytes[1..].iter().all(u8::is_ascii_digit)
}

fn node_sort_key(external: &str) -> (u64, u8) {
    let kind = u8::from(external.starts_with('P'));
    let number = external[1..].parse::<u64>().unwrap_or(u64::MAX);
    (number, kind)
}

/// Strip `"..."` or `'...'` wrapping, with an optional `@lang` suffix.
fn unquote(raw: &str) -> &str {
    let s = raw.trim();
    for q in ['"', '\''] {
        if !s.starts_with(q) || s.len() < 2 {
            continue;
        }
        if s.ends_with(q) {
            return &s[1..s.len() - 1];
        }
        if let Some(end) = s.rfind(&format!("{q}@")) {
            if end > 0 {
                return &s[1..end];
            }
        }
    }
    s
}

/// Immutable ontology view built from an edge file.
#[derive(Debug)]
pub struct OntologyStore {
    externals: Vec<Box<str>>,
    lookup: HashMap<Box<str>, NodeId>,
    statements: Vec<Statement>,
    statement_lookup: HashMap<String, usize>,
    by_subject: HashMap<NodeId, Vec<u32>>,
    by_subject_property: HashMap<(NodeId, NodeId), Vec<u32>>,
    labels: HashMap<NodeId, String>,
    descriptions: HashMap<NodeId, String>,
    is_class: Vec<bool>,
    parents: Vec<Vec<NodeId>>,
    children: Vec<Vec<NodeId>>,
    direct: Vec<Vec<NodeId>>,
    transitive: Vec<Vec<NodeId>>,
    in_cycle: Vec<bool>,
    cycles: Vec<Vec<NodeId>>,
    broken_edges: Vec<(NodeId, NodeId)>,
    subclass_property: Option<NodeId>,
    instance_property: Option<NodeId>,
    policy: CyclePolicy,
    report: IngestReport,
}

/// Parse an edge file with default options (cycle policy `error`).
pub fn parse_edge_file<R: BufRead>(reader: R) -> Result<OntologyStore> {
    OntologyStore::parse(reader, StoreOptions::default())
}

struct RawStatement {
    id: String,
    subject: u32,
    property: u32,
    object: RawValue,
}

enum RawValue {
    Node(u32),
    Literal(String),
}

struct RawQualifier {
    line: usize,
    statement: String,
    property: u32,
    value: RawValue,
}

#[derive(Default)]
struct Interner {
    names: Vec<Box<str>>,
    lookup: HashMap<Box<str>, u32>,
}

impl Interner {
    fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.lookup.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        let boxed: Box<str> = name.into();
        self.names.push(boxed.clone());
        self.lookup.insert(boxed, id);
        id
    }

    fn value(&mut self, raw: &str) -> RawValue {
        if is_node_identifier(raw) {
            RawValue::Node(self.intern(raw))
        } else {
            RawValue::Literal(raw.to_string())
        }
    }
}

impl OntologyStore {
    pub fn parse<R: BufRead>(reader: R, options: StoreOptions) -> Result<Self> {
        let mut lines = reader.lines();
        crate::tsv::check_header(lines.next(), EDGE_HEADER)?;

        let mut interner = Interner::default();
        let mut report = IngestReport::default();
        let mut statements: Vec<RawStatement> = Vec::new();
        let mut statement_lookup: HashMap<String, usize> = HashMap::new();
        let mut qualifiers: Vec<RawQualifier> = Vec::new();
        let mut labels: Vec<(u32, String)> = Vec::new();
        let mut descriptions: Vec<(u32, String)> = Vec::new();

        for (offset, line) in lines.enumerate() {
            let line_no = offset + 2;
            let line = line?;
            let line = line.trim_end_matches('\r');
            report.rows += 1;
            let fields: Vec<&str> = line.split('\t').collect();
            let [id, node1, label, node2] = fields[..] else {
                report.malformed_lines.push(line_no);
                continue;
            };
            if node1.is_empty() || label.is_empty() {
                report.malformed_lines.push(line_no);
                continue;
            }
            match label {
                "label" | "description" => {
                    if !is_node_identifier(node1) {
                        report.malformed_lines.push(line_no);
                        continue;
                    }
                    let node = interner.intern(node1);
                    let text = unquote(node2).to_string();
                    if label == "label" {
                        labels.push((node, text));
                    } else {
                        descriptions.push((node, text));
                    }
                }
                _ if !is_node_identifier(label) || node2.is_empty() => {
                    report.malformed_lines.push(line_no);
                }
                _ if is_node_identifier(node1) => {
                    if id.is_empty() {
                        report.malformed_lines.push(line_no);
                        continue;
                    }
                    if statement_lookup.contains_key(id) {
                        return Err(Error::DuplicateStatement {
                            line: line_no,
                            id: id.to_string(),
                        });
                    }
                    statement_lookup.insert(id.to_string(), statements.len());
                    let subject = interner.intern(node1);
                    let property = interner.intern(label);
                    let object = interner.value(node2);
                    statements.push(RawStatement {
                        id: id.to_string(),
                        subject,
                        property,
                        object,
                    });
                }
                _ => {
                    let property = interner.intern(label);
                    let value = interner.value(node2);
                    qualifiers.push(RawQualifier {
                        line: line_no,
                        statement: node1.to_string(),
                        property,
                        value,
                    });
                }
            }
        }

        // Re-number nodes so that NodeId order matches external numeric order.
        let mut order: Vec<u32> = (0..interner.names.len() as u32).collect();
        order.sort_by_key(|&i| node_sort_key(&interner.names[i as usize]));
        let mut remap = vec![NodeId(0); order.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old as usize] = NodeId(new as u32);
        }
        let externals: Vec<Box<str>> = order
            .iter()
            .map(|&old| interner.names[old as usize].clone())
            .collect();
        let map_value = |raw: RawValue| match raw {
            RawValue::Node(n) => Value::Node(remap[n as usize]),
            RawValue::Literal(s) => Value::Literal(s),
        };

        let mut statements: Vec<Statement> = statements
            .into_iter()
            .map(|raw| Statement {
                id: raw.id,
                subject: remap[raw.subject as usize],
                property: remap[raw.property as usize],
                object: map_value(raw.object),
                qualifiers: Vec::new(),
            })
            .collect();
        for q in qualifiers {
            match statement_lookup.get(&q.statement) {
                Some(&index) => statements[index].qualifiers.push(Qualifier {
                    property: remap[q.property as usize],
                    value: map_value(q.value),
                }),
                None => report.dangling_qualifier_lines.push(q.line),
            }
        }

        let mut label_map = HashMap::new();
        for (node, text) in labels {
            label_map.entry(remap[node as usize]).or_insert(text);
        }
        let mut description_map = HashMap::new();
        for (node, text) in descriptions {
            description_map.entry(remap[node as usize]).or_insert(text);
        }

        let lookup = externals
            .iter()
            .enumerate()
            .map(|(i, name)| (name.clone(), NodeId(i as u32)))
            .collect::<HashMap<_, _>>();
        Ok(Self::assemble(
            externals,
            lookup,
            statements,
            statement_lookup,
            label_map,
            description_map,
            options,
            report,
        ))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        externals: Vec<Box<str>>,
        lookup: HashMap<Box<str>, NodeId>,
        statements: Vec<Statement>,
        statement_lookup: HashMap<String, usize>,
        labels: HashMap<NodeId, String>,
        descriptions: HashMap<NodeId, String>,
        options: StoreOptions,
        report: IngestReport,
    ) -> Self {
        let n = externals.len();
        let subclass_property = lookup.get(SUBCLASS_OF).copied();
        let instance_property = lookup.get(INSTANCE_OF).copied();

        let mut by_subject: HashMap<NodeId, Vec<u32>> = HashMap::new();
        let mut by_subject_property: HashMap<(NodeId, NodeId), Vec<u32>> = HashMap::new();
        let mut subclass_edges: Vec<(NodeId, NodeId)> = Vec::new();
        let mut memberships: Vec<(NodeId, NodeId)> = Vec::new();
        let mut is_class = vec![false; n];

        for (i, st) in statements.iter().enumerate() {
            by_subject.entry(st.subject).or_default().push(i as u32);
            by_subject_property
                .entry((st.subject, st.property))
                .or_default()
                .push(i as u32);
            let Some(object) = st.object.as_node() else {
                continue;
            };
            if Some(st.property) == subclass_property {
                is_class[st.subject.index()] = true;
                is_class[object.index()] = true;
                if st.subject != object {
                    subclass_edges.push((st.subject, object));
                }
            } else if Some(st.property) == instance_property {
                is_class[object.index()] = true;
                memberships.push((object, st.subject));
            }
        }
        subclass_edges.sort_unstable();
        subclass_edges.dedup();
        memberships.sort_unstable();
        memberships.dedup();

        let mut direct: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for (class, entity) in memberships {
            direct[class.index()].push(entity);
        }

        // Strongly connected components over parent -> child edges. Tarjan
        // emits them in reverse topological order, i.e. children first.
        let mut graph: DiGraph<NodeId, ()> = DiGraph::with_capacity(n, subclass_edges.len());
        let handles: Vec<NodeIndex> = (0..n).map(|i| graph.add_node(NodeId(i as u32))).collect();
        for &(child, parent) in &subclass_edges {
            graph.add_edge(handles[parent.index()], handles[child.index()], ());
        }
        let components = tarjan_scc(&graph);

        let mut component_of = vec![0usize; n];
        let mut cycles = Vec::new();
        let mut in_cycle = vec![false; n];
        for (c, members) in components.iter().enumerate() {
            for &m in members {
                component_of[m.index()] = c;
            }
            if members.len() > 1 {
                let mut cycle: Vec<NodeId> = members.iter().map(|&m| graph[m]).collect();
                cycle.sort_unstable();
                for node in &cycle {
                    in_cycle[node.index()] = true;
                }
                cycles.push(cycle);
            }
        }
        cycles.sort();

        let mut broken_edges = Vec::new();
        let retained: Vec<(NodeId, NodeId)> = match options.cycle_policy {
            CyclePolicy::Error => subclass_edges,
            CyclePolicy::Break => subclass_edges
                .into_iter()
                .filter(|&(child, parent)| {
                    let inside = component_of[child.index()] == component_of[parent.index()];
                    if inside && child > parent {
                        broken_edges.push((child, parent));
                        false
                    } else {
                        true
                    }
                })
                .collect(),
        };

        let mut parents: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        let mut children: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for &(child, parent) in &retained {
            parents[child.index()].push(parent);
            children[parent.index()].push(child);
        }
        for list in children.iter_mut() {
            list.sort_unstable();
        }

        let transitive = match options.cycle_policy {
            CyclePolicy::Error => transitive_closure(&components, &component_of, &graph, &direct),
            CyclePolicy::Break => {
                let mut acyclic: DiGraph<NodeId, ()> = DiGraph::with_capacity(n, retained.len());
                let handles: Vec<NodeIndex> =
                    (0..n).map(|i| acyclic.add_node(NodeId(i as u32))).collect();
                for &(child, parent) in &retained {
                    acyclic.add_edge(handles[parent.index()], handles[child.index()], ());
                }
                let components = tarjan_scc(&acyclic);
                let mut component_of = vec![0usize; n];
                for (c, members) in components.iter().enumerate() {
                    for &m in members {
                        component_of[m.index()] = c;
                    }
                }
                transitive_closure(&components, &component_of, &acyclic, &direct)
            }
        };

        OntologyStore {
            externals,
            lookup,
            statements,
            statement_lookup,
            by_subject,
            by_subject_property,
            labels,
            descriptions,
            is_class,
            parents,
            children,
            direct,
            transitive,
            in_cycle,
            cycles,
            broken_edges,
            subclass_property,
            instance_property,
            policy: options.cycle_policy,
            report,
        }
    }

    pub fn report(&self) -> &IngestReport {
        &self.report
    }

    pub fn cycle_policy(&self) -> CyclePolicy {
        self.policy
    }

    pub fn node_count(&self) -> usize {
        self.externals.len()
    }

    pub fn node(&self, external: &str) -> Option<NodeId> {
        self.lookup.get(external).copied()
    }

    /// Resolve an external identifier, failing with [`Error::UnknownNode`].
    pub fn require(&self, external: &str) -> Result<NodeId> {
        self.node(external)
            .ok_or_else(|| Error::UnknownNode(external.to_string()))
    }

    pub fn external(&self, id: NodeId) -> &str {
        &self.externals[id.index()]
    }

    pub fn kind(&self, id: NodeId) -> NodeKind {
        if self.externals[id.index()].starts_with('P') {
            NodeKind::Property
        } else {
            NodeKind::Entity
        }
    }

    pub fn label(&self, id: NodeId) -> Option<&str> {
        self.labels.get(&id).map(String::as_str)
    }

    /// Label if present, external identifier otherwise.
    pub fn display(&self, id: NodeId) -> &str {
        self.label(id).unwrap_or_else(|| self.external(id))
    }

    pub fn description(&self, id: NodeId) -> Option<&str> {
        self.descriptions.get(&id).map(String::as_str)
    }

    pub fn label_count(&self) -> usize {
        self.labels.len()
    }

    pub fn description_count(&self) -> usize {
        self.descriptions.len()
    }

    pub fn subclass_property(&self) -> Option<NodeId> {
        self.subclass_property
    }

    pub fn instance_property(&self) -> Option<NodeId> {
        self.instance_property
    }

    pub fn is_structural(&self, property: NodeId) -> bool {
        Some(property) == self.subclass_property || Some(property) == self.instance_property
    }

    /// All statements in input-file order.
    pub fn statements(&self) -> &[Statement] {
        &self.statements
    }

    pub fn statement(&self, id: &str) -> Option<&Statement> {
        self.statement_lookup.get(id).map(|&i| &self.statements[i])
    }

    pub fn statements_of(&self, subject: NodeId) -> impl Iterator<Item = &Statement> + '_ {
        self.by_subject
            .get(&subject)
            .into_iter()
            .flatten()
            .map(|&i| &self.statements[i as usize])
    }

    pub fn statements_with(
        &self,
        subject: NodeId,
        property: NodeId,
    ) -> impl Iterator<Item = &Statement> + '_ {
        self.by_subject_property
            .get(&(subject, property))
            .into_iter()
            .flatten()
            .map(|&i| &self.statements[i as usize])
    }

    /// First `(subject, P279, object)` statement in file order.
    pub fn subclass_statement(&self, subject: NodeId, object: NodeId) -> Option<&Statement> {
        let property = self.subclass_property?;
        self.statements_with(subject, property)
            .find(|st| st.object == Value::Node(object))
    }

    pub fn is_class(&self, id: NodeId) -> bool {
        self.is_class.get(id.index()).copied().unwrap_or(false)
    }

    pub fn classes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.is_class
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(|(i, _)| NodeId(i as u32))
    }

    pub fn class_count(&self) -> usize {
        self.is_class.iter().filter(|&&c| c).count()
    }

    fn check(&self, id: NodeId) -> Result<()> {
        if id.index() < self.externals.len() {
            Ok(())
        } else {
            Err(Error::UnknownNode(format!("#{}", id.0)))
        }
    }

    /// Direct superclasses, sorted. Edges dropped by the `break` policy are
    /// not included.
    pub fn parents_of(&self, class: NodeId) -> &[NodeId] {
        self.parents.get(class.index()).map_or(&[], Vec::as_slice)
    }

    /// Direct subclasses, sorted.
    pub fn subclasses_of(&self, class: NodeId) -> &[NodeId] {
        self.children.get(class.index()).map_or(&[], Vec::as_slice)
    }

    /// Effective `(child, parent)` subclass edges ordered by `(parent, child)`.
    pub fn subclass_edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.children
            .iter()
            .enumerate()
            .flat_map(|(p, kids)| kids.iter().map(move |&c| (c, NodeId(p as u32))))
    }

    pub fn instances_of(&self, class: NodeId, mode: InstanceMode) -> Result<InstanceSet<'_>> {
        self.check(class)?;
        if self.policy == CyclePolicy::Error && self.in_cycle[class.index()] {
            let cycle = self
                .cycles
                .iter()
                .find(|c| c.contains(&class))
                .map(|c| c.iter().map(|&n| self.external(n).to_string()).collect())
                .unwrap_or_default();
            return Err(Error::Cycle {
                class: self.external(class).to_string(),
                cycle,
            });
        }
        let members = match mode {
            InstanceMode::Direct => &self.direct[class.index()],
            InstanceMode::Transitive => &self.transitive[class.index()],
        };
        Ok(InstanceSet {
            class,
            mode,
            members,
        })
    }

    /// Other direct children of every parent of `class`, sorted by id.
    pub fn siblings_of(&self, class: NodeId) -> Result<Vec<NodeId>> {
        self.check(class)?;
        let mut out: Vec<NodeId> = self
            .parents_of(class)
            .iter()
            .flat_map(|&p| self.subclasses_of(p).iter().copied())
            .filter(|&c| c != class)
            .collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Ancestors reachable in at most `max_distance` subclass hops, with the
    /// minimum hop count. The class itself is excluded.
    pub fn ancestors_within(
        &self,
        class: NodeId,
        max_distance: usize,
    ) -> Result<BTreeMap<NodeId, usize>> {
        self.check(class)?;
        if max_distance == 0 {
            return Err(Error::InvalidArgument(
                "max_distance must be at least 1".into(),
            ));
        }
        let mut out = BTreeMap::new();
        let mut queue = VecDeque::from([(class, 0usize)]);
        while let Some((node, depth)) = queue.pop_front() {
            if depth == max_distance {
                continue;
            }
            for &parent in self.parents_of(node) {
                if parent != class && !out.contains_key(&parent) {
                    out.insert(parent, depth + 1);
                    queue.push_back((parent, depth + 1));
                }
            }
        }
        Ok(out)
    }

    /// Strongly connected components of size > 1 in the subclass graph,
    /// as recorded at build time (before any edges were broken).
    pub fn detect_cycles(&self) -> &[Vec<NodeId>] {
        &self.cycles
    }

    /// Subclass edges removed under [`CyclePolicy::Break`].
    pub fn broken_edges(&self) -> &[(NodeId, NodeId)] {
        &self.broken_edges
    }

    /// Serialize back to the edge-file format. Qualifier rows follow their
    /// statement; labels and descriptions come last, ordered by node id.
    pub fn write_edge_file<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{EDGE_HEADER}")?;
        let value = |v: &Value| match v {
            Value::Node(n) => self.external(*n).to_string(),
            Value::Literal(s) => s.clone(),
        };
        for st in &self.statements {
            writeln!(
                out,
                "{}\t{}\t{}\t{}",
                st.id,
                self.external(st.subject),
                self.external(st.property),
                value(&st.object)
            )?;
            for (i, q) in st.qualifiers.iter().enumerate() {
                writeln!(
                    out,
                    "{}-q{}\t{}\t{}\t{}",
                    st.id,
                    i + 1,
                    st.id,
                    self.external(q.property),
                    value(&q.value)
                )?;
            }
        }
        let mut labels: Vec<_> = self.labels.iter().collect();
        labels.sort_unstable();
        for (node, text) in labels {
            let ext = self.external(*node);
            writeln!(out, "{ext}-label\t{ext}\tlabel\t{text}")?;
        }
        let mut descriptions: Vec<_> = self.descriptions.iter().collect();
        descriptions.sort_unstable();
        for (node, text) in descriptions {
            let ext = self.external(*node);
            writeln!(out, "{ext}-description\t{ext}\tdescription\t{text}")?;
        }
        Ok(())
    }
}

/// Union instance sets bottom-up over the condensation. `components` must
/// list children before parents (Tarjan order over parent -> child edges).
fn transitive_closure(
    components: &[Vec<NodeIndex>],
    component_of: &[usize],
    graph: &DiGraph<NodeId, ()>,
    direct: &[Vec<NodeId>],
) -> Vec<Vec<NodeId>> {
    let mut result: Vec<Vec<NodeId>> = vec![Vec::new(); direct.len()];
    for (c, members) in components.iter().enumerate() {
        let mut merged: Vec<NodeId> = Vec::new();
        for &m in members {
            merged.extend_from_slice(&direct[graph[m].index()]);
            for child in graph.neighbors(m) {
                if component_of[child.index()] != c {
                    merged.extend_from_slice(&result[graph[child].index()]);
                }
            }
        }
        if merged.is_empty() {
            continue;
        }
        merged.sort_unstable();
        merged.dedup();
        merged.shrink_to_fit();
        let (last, rest) = members.split_last().expect("component is non-empty");
        for &m in rest {
            result[graph[m].index()] = merged.clone();
        }
        result[graph[*last].index()] = merged;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store(text: &str) -> OntologyStore {
        parse_edge_file(text.as_bytes()).unwrap()
    }

    fn fix_a() -> OntologyStore {
        store(include_str!("../fixtures/fix_a.tsv"))
    }

    fn ids(s: &OntologyStore, names: &[&str]) -> Vec<NodeId> {
        names.iter().map(|n| s.require(n).unwrap()).collect()
    }

    #[test]
    fn header_only() {
        let s = store("id\tnode1\tlabel\tnode2\n");
        assert_eq!(s.statements().len(), 0);
        assert_eq!(s.class_count(), 0);
    }

    #[test]
    fn missing_header_is_fatal() {
        let err = parse_edge_file("s1\tQ1\tP279\tQ2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Header { .. }));
        assert!(matches!(
            parse_edge_file("".as_bytes()).unwrap_err(),
            Error::Header { .. }
        ));
    }

    #[test]
    fn duplicate_statement_reports_line() {
        let err = parse_edge_file(
            "id\tnode1\tlabel\tnode2\ns1\tQ1\tP279\tQ2\ns1\tQ3\tP279\tQ2\n".as_bytes(),
        )
        .unwrap_err();
        match err {
            Error::DuplicateStatement { line, id } => {
                assert_eq!(line, 3);
                assert_eq!(id, "s1");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn qualifier_attaches_to_statement() {
        let s = store(
            "id\tnode1\tlabel\tnode2\n\
             s1\tQ250\tP279\tQ1921606\n\
             s1-q\ts1\tP155\tQ17517\n",
        );
        let st = s.statement("s1").unwrap();
        assert_eq!(st.qualifiers.len(), 1);
        assert_eq!(s.external(st.qualifiers[0].property), "P155");
        assert_eq!(
            st.qualifiers[0].value,
            Value::Node(s.require("Q17517").unwrap())
        );
    }

    #[test]
    fn qualifier_order_and_forward_references() {
        let s = store(
            "id\tnode1\tlabel\tnode2\n\
             q1\ts1\tP2\tQ9\n\
             s1\tQ1\tP279\tQ2\n\
             q2\ts1\tP3\tfree text\n\
             q3\tnope\tP3\tQ9\n",
        );
        let st = s.statement("s1").unwrap();
        let props: Vec<&str> = st
            .qualifiers
            .iter()
            .map(|q| s.external(q.property))
            .collect();
        assert_eq!(props, ["P2", "P3"]);
        assert_eq!(st.qualifiers[1].value, Value::Literal("free text".into()));
        assert_eq!(s.report().dangling_qualifier_lines, vec![5]);
    }

    #[test]
    fn malformed_rows_are_counted() {
        let s = store(
            "id\tnode1\tlabel\tnode2\n\
             s1\tQ1\tP279\n\
             \n\
             s2\tQ1\tnot-a-property\tQ2\n\
             s3\tQ1\tP279\tQ2\n",
        );
        assert_eq!(s.report().malformed_lines, vec![2, 3, 4]);
        assert_eq!(s.statements().len(), 1);
    }

    #[test]
    fn labels_are_unquoted() {
        let s = store(
            "id\tnode1\tlabel\tnode2\n\
             l1\tQ1\tlabel\t'red wine'@en\n\
             l2\tQ2\tlabel\t\"wine\"@en\n\
             d1\tQ1\tdescription\twine with a dark colour\n",
        );
        assert_eq!(s.label(s.require("Q1").unwrap()), Some("red wine"));
        assert_eq!(s.label(s.require("Q2").unwrap()), Some("wine"));
        assert_eq!(
            s.description(s.require("Q1").unwrap()),
            Some("wine with a dark colour")
        );
    }

    #[test]
    fn node_ids_follow_numeric_order() {
        let s = store(
            "id\tnode1\tlabel\tnode2\n\
             s1\tQ100\tP279\tQ20\n\
             s2\tQ3\tP279\tQ20\n",
        );
        let [q3, q20, q100] = ids(&s, &["Q3", "Q20", "Q100"])[..] else {
            unreachable!()
        };
        assert!(q3 < q20 && q20 < q100);
        assert_eq!(s.kind(s.require("P279").unwrap()), NodeKind::Property);
        assert_eq!(s.kind(q3), NodeKind::Entity);
    }

    #[test]
    fn literals_never_become_classes() {
        let s = store(
            "id\tnode1\tlabel\tnode2\n\
             s1\tQ1\tP31\tsomething\n\
             s2\tQ1\tP279\t12\n",
        );
        assert_eq!(s.class_count(), 0);
    }

    #[test]
    fn fix_a_instance_sets() {
        let s = fix_a();
        let [building, house, temple, cottage] =
            ids(&s, &["Q41176", "Q3947", "Q44539", "Q5783996"])[..]
        else {
            unreachable!()
        };
        assert_eq!(
            s.instances_of(building, InstanceMode::Transitive)
                .unwrap()
                .len(),
            12
        );
        assert_eq!(
            s.instances_of(house, InstanceMode::Direct).unwrap().len(),
            4
        );
        assert_eq!(
            s.instances_of(house, InstanceMode::Transitive)
                .unwrap()
                .len(),
            6
        );
        assert_eq!(
            s.instances_of(temple, InstanceMode::Transitive)
                .unwrap()
                .len(),
            3
        );
        assert_eq!(
            s.instances_of(cottage, InstanceMode::Transitive)
                .unwrap()
                .len(),
            2
        );
        assert_eq!(s.class_count(), 4);
        assert!(s.detect_cycles().is_empty());
    }

    #[test]
    fn class_without_instances_is_empty() {
        let s = store("id\tnode1\tlabel\tnode2\ns1\tQ1\tP279\tQ2\n");
        let q1 = s.require("Q1").unwrap();
        assert!(s
            .instances_of(q1, InstanceMode::Transitive)
            .unwrap()
            .is_empty());
        assert!(s.instances_of(q1, InstanceMode::Direct).unwrap().is_empty());
    }

    #[test]
    fn unknown_class_is_an_error() {
        let s = fix_a();
        assert!(matches!(s.require("Q1"), Err(Error::UnknownNode(_))));
        let foreign = NodeId(10_000);
        assert!(matches!(
            s.instances_of(foreign, InstanceMode::Direct),
            Err(Error::UnknownNode(_))
        ));
        assert!(s.siblings_of(foreign).is_err());
        assert!(s.ancestors_within(foreign, 1).is_err());
    }

    #[test]
    fn siblings_and_ancestors() {
        let s = fix_a();
        let [building, house, temple, cottage] =
            ids(&s, &["Q41176", "Q3947", "Q44539", "Q5783996"])[..]
        else {
            unreachable!()
        };
        assert_eq!(s.siblings_of(house).unwrap(), vec![temple]);
        assert!(s.siblings_of(cottage).unwrap().is_empty());
        let anc = s.ancestors_within(cottage, 2).unwrap();
        assert_eq!(anc, BTreeMap::from([(house, 1), (building, 2)]));
        let one: Vec<NodeId> = s
            .ancestors_within(cottage, 1)
            .unwrap()
            .into_keys()
            .collect();
        assert_eq!(one, s.parents_of(cottage));
        assert!(s.ancestors_within(cottage, 0).is_err());
    }

    #[test]
    fn two_cycle_is_reported_and_errors() {
        let text = "id\tnode1\tlabel\tnode2\n\
                    s1\tQ1\tP279\tQ2\n\
                    s2\tQ2\tP279\tQ1\n\
                    s3\tQ2\tP279\tQ3\n\
                    i1\tQ10\tP31\tQ1\n";
        let s = store(text);
        let [q1, q2, q3] = ids(&s, &["Q1", "Q2", "Q3"])[..] else {
            unreachable!()
        };
        assert_eq!(s.detect_cycles(), &[vec![q1, q2]]);
        assert!(matches!(
            s.instances_of(q1, InstanceMode::Transitive),
            Err(Error::Cycle { .. })
        ));
        // The condensed closure still reaches classes above the cycle.
        assert_eq!(
            s.instances_of(q3, InstanceMode::Transitive).unwrap().len(),
            1
        );

        let broken = OntologyStore::parse(
            text.as_bytes(),
            StoreOptions {
                cycle_policy: CyclePolicy::Break,
            },
        )
        .unwrap();
        assert_eq!(broken.detect_cycles().len(), 1);
        assert_eq!(broken.broken_edges(), &[(q2, q1)]);
        assert_eq!(broken.parents_of(q1), &[q2]);
        assert_eq!(broken.parents_of(q2), &[q3]);
        assert_eq!(
            broken
                .instances_of(q3, InstanceMode::Transitive)
                .unwrap()
                .len(),
            1
        );
        assert_eq!(
            broken
                .instances_of(q2, InstanceMode::Transitive)
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn write_round_trip_keeps_labels_and_qualifiers() {
        let s = fix_a();
        let mut buf = Vec::new();
        s.write_edge_file(&mut buf).unwrap();
        let again = parse_edge_file(buf.as_slice()).unwrap();
        assert_eq!(again.statements().len(), s.statements().len());
        let st = again.statement("s3").unwrap();
        assert_eq!(st.qualifiers.len(), 1);
        assert_eq!(again.label(again.require("Q3947").unwrap()), Some("house"));
        assert_eq!(
            again.description(again.require("Q3947").unwrap()),
            s.description(s.require("Q3947").unwrap())
        );
    }
}
