//! Candidate analogical class pairs and instance-level analogies.
//!
//! Metric rows that pass every threshold yield a parent-child candidate,
//! and every two passing children of the same parent yield a sibling
//! candidate. For a candidate `(A, B)`, an instance analogy is a pair of
//! instances `a` of `A` and `b` of `B` whose statements point at the same
//! node, e.g. a painting that depicts Paris and a film set in Paris.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metrics::ClassMetrics;
use crate::store::{InstanceMode, NodeId, OntologyStore};

/// Conjunctive thresholds. A row passes iff
/// `ic_child > ic_min && rr < rr_max && co < co_max && h_parent > h_min`;
/// undefined metrics fail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilterConfig {
    pub ic_min: u64,
    pub rr_max: f64,
    pub co_max: f64,
    pub h_min: f64,
    pub mode: InstanceMode,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            ic_min: 1000,
            rr_max: 0.85,
            co_max: 0.5,
            h_min: 1.0,
            mode: InstanceMode::Transitive,
        }
    }
}

impl FilterConfig {
    pub fn passes(&self, row: &ClassMetrics) -> bool {
        let below = |v: Option<f64>, max: f64| v.is_some_and(|v| v < max);
        row.ic_child as u64 > self.ic_min
            && below(row.rr, self.rr_max)
            && below(row.co, self.co_max)
            && row.h_parent.is_some_and(|h| h > self.h_min)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CandidateKind {
    ParentChild,
    Sibling,
}

impl CandidateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CandidateKind::ParentChild => "parent-child",
            CandidateKind::Sibling => "sibling",
        }
    }
}

impl fmt::Display for CandidateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// For `ParentChild`, `class_a` is the parent and `class_b` the child.
/// For `Sibling`, both are direct children of `parent` and
/// `class_a < class_b`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassPairCandidate {
    pub kind: CandidateKind,
    pub class_a: NodeId,
    pub class_b: NodeId,
    pub parent: Option<NodeId>,
    /// The metric rows that admitted this candidate.
    pub metrics: Vec<ClassMetrics>,
}

pub fn filter_classes(
    rows: &[ClassMetrics],
    config: &FilterConfig,
) -> Result<Vec<ClassPairCandidate>> {
    if let Some(row) = rows.iter().find(|r| r.mode != config.mode) {
        return Err(Error::ModeMismatch {
            metrics: row.mode.as_str(),
            filter: config.mode.as_str(),
        });
    }
    let mut by_parent: BTreeMap<NodeId, Vec<&ClassMetrics>> = BTreeMap::new();
    for row in rows.iter().filter(|r| config.passes(r)) {
        by_parent.entry(row.parent).or_default().push(row);
    }

    let mut out = Vec::new();
    for (parent, mut passing) in by_parent {
        passing.sort_by_key(|r| r.child);
        passing.dedup_by_key(|r| r.child);
        for row in &passing {
            out.push(ClassPairCandidate {
                kind: CandidateKind::ParentChild,
                class_a: parent,
                class_b: row.child,
                parent: None,
                metrics: vec![(*row).clone()],
            });
        }
        for (i, left) in passing.iter().enumerate() {
            for right in &passing[i + 1..] {
                out.push(ClassPairCandidate {
                    kind: CandidateKind::Sibling,
                    class_a: left.child,
                    class_b: right.child,
                    parent: Some(parent),
                    metrics: vec![(*left).clone(), (*right).clone()],
                });
            }
        }
    }
    Ok(out)
}

/// Whether both sides of a shared value must use the same property.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SharedValuePolicy {
    SameProperty,
    #[default]
    AnyProperty,
}

impl FromStr for SharedValuePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "same-property" => Ok(SharedValuePolicy::SameProperty),
            "any-property" => Ok(SharedValuePolicy::AnyProperty),
            other => Err(Error::InvalidArgument(format!(
                "unknown policy `{other}` (expected same-property|any-property)"
            ))),
        }
    }
}

impl fmt::Display for SharedValuePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SharedValuePolicy::SameProperty => "same-property",
            SharedValuePolicy::AnyProperty => "any-property",
        })
    }
}

/// `a property_a value` and `b property_b value` both hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InstanceAnalogy {
    pub a: NodeId,
    pub b: NodeId,
    pub value: NodeId,
    pub property_a: NodeId,
    pub property_b: NodeId,
}

impl InstanceAnalogy {
    fn sort_key(&self) -> (NodeId, NodeId, NodeId, NodeId, NodeId) {
        (self.value, self.a, self.b, self.property_a, self.property_b)
    }

    /// Same analogy with `a < b`.
    pub fn canonical(self) -> Self {
        if self.a <= self.b {
            self
        } else {
            InstanceAnalogy {
                a: self.b,
                b: self.a,
                value: self.value,
                property_a: self.property_b,
                property_b: self.property_a,
            }
        }
    }
}

fn difference(a: &[NodeId], b: &[NodeId]) -> Vec<NodeId> {
    a.iter()
        .copied()
        .filter(|x| b.binary_search(x).is_err())
        .collect()
}

/// Instance pairs of one candidate, sorted by `(value, a, b)` and cut at
/// `limit`.
///
/// `a` ranges over instances of `class_a` that are not instances of
/// `class_b`. For siblings `b` symmetrically excludes `class_a`; for a
/// parent-child candidate `b` is any instance of the child, which is
/// always also an instance of the parent in transitive mode. Structural
/// properties (`P31`, `P279`) and literal values never match.
pub fn instance_analogies(
    store: &OntologyStore,
    candidate: &ClassPairCandidate,
    policy: SharedValuePolicy,
    limit: usize,
    mode: InstanceMode,
) -> Result<Vec<InstanceAnalogy>> {
    if limit == 0 {
        return Err(Error::InvalidArgument("limit must be at least 1".into()));
    }
    let set_a = store.instances_of(candidate.class_a, mode)?.members;
    let set_b = store.instances_of(candidate.class_b, mode)?.members;
    let side_a = difference(set_a, set_b);
    let side_b = match candidate.kind {
        CandidateKind::Sibling => difference(set_b, set_a),
        CandidateKind::ParentChild => set_b.to_vec(),
    };

    let mut by_value: HashMap<NodeId, Vec<(NodeId, NodeId)>> = HashMap::new();
    for &a in &side_a {
        for st in store.statements_of(a) {
            if store.is_structural(st.property) {
                continue;
            }
            if let Some(v) = st.object.as_node() {
                by_value.entry(v).or_default().push((a, st.property));
            }
        }
    }
    if by_value.is_empty() {
        return Ok(Vec::new());
    }

    let mut out = Vec::new();
    for &b in &side_b {
        for st in store.statements_of(b) {
            if store.is_structural(st.property) {
                continue;
            }
            let Some(v) = st.object.as_node() else {
                continue;
            };
            let Some(matches) = by_value.get(&v) else {
                continue;
            };
            for &(a, pa) in matches {
                if a == b || (policy == SharedValuePolicy::SameProperty && pa != st.property) {
                    continue;
                }
                out.push(InstanceAnalogy {
                    a,
                    b,
                    value: v,
                    property_a: pa,
                    property_b: st.property,
                });
            }
        }
    }
    out.sort_by_key(InstanceAnalogy::sort_key);
    out.dedup();
    out.truncate(limit);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MiningConfig {
    pub policy: SharedValuePolicy,
    /// Per-candidate cap.
    pub limit: usize,
    /// Cap on the merged output, if any.
    pub total_cap: Option<usize>,
    pub mode: InstanceMode,
}

impl Default for MiningConfig {
    fn default() -> Self {
        Self {
            policy: SharedValuePolicy::AnyProperty,
            limit: 100,
            total_cap: None,
            mode: InstanceMode::Transitive,
        }
    }
}

/// Mine every candidate in parallel and merge. The same instance pair can
/// surface through several candidates (a sibling pair and the matching
/// parent-child pairs), so the merge orients each analogy with `a < b`
/// and drops repeats.
pub fn mine_candidates(
    store: &OntologyStore,
    candidates: &[ClassPairCandidate],
    config: &MiningConfig,
) -> Result<Vec<InstanceAnalogy>> {
    let per_candidate: Vec<Vec<InstanceAnalogy>> = candidates
        .par_iter()
        .map(|c| instance_analogies(store, c, config.policy, config.limit, config.mode))
        .collect::<Result<_>>()?;
    let mut merged: Vec<InstanceAnalogy> = per_candidate
        .into_iter()
        .flatten()
        .map(InstanceAnalogy::canonical)
        .collect();
    merged.sort_by_key(InstanceAnalogy::sort_key);
    merged.dedup();
    if let Some(cap) = config.total_cap {
        merged.truncate(cap);
    }
    Ok(merged)
}

pub const CANDIDATES_HEADER: &str = "kind\tclassA\tclassB\tparent";
pub const ANALOGIES_HEADER: &str = "a\tb\tvalue\tpropA\tpropB";

pub fn write_candidates<W: Write>(
    store: &OntologyStore,
    candidates: &[ClassPairCandidate],
    mut out: W,
) -> Result<()> {
    writeln!(out, "{CANDIDATES_HEADER}")?;
    for c in candidates {
        writeln!(
            out,
            "{}\t{}\t{}\t{}",
            c.kind,
            store.external(c.class_a),
            store.external(c.class_b),
            c.parent.map_or("", |p| store.external(p))
        )?;
    }
    Ok(())
}

pub fn write_instance_analogies<W: Write>(
    store: &OntologyStore,
    analogies: &[InstanceAnalogy],
    mut out: W,
) -> Result<()> {
    writeln!(out, "{ANALOGIES_HEADER}")?;
    for x in analogies {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            store.external(x.a),
            store.external(x.b),
            store.external(x.value),
            store.external(x.property_a),
            store.external(x.property_b)
        )?;
    }
    Ok(())
}
