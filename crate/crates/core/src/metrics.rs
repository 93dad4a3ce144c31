//! Generality, selectivity, salience and diversity of subclass structure.
//!
//! | metric | definition |
//! |---|---|
//! | instance count `IC(C)` | `|C_i|` |
//! | reduction ratio `RR(P, C)` | `1 - |C_i| / |P_i|` |
//! | class overlap `CO(C)` | Jaccard of `C_i` and the instances of the largest sibling |
//! | entropy `H(P)` | `sum over subclasses C of -p(C) log2 p(C)`, `p(C) = |C_i| / |P_i|` |
//!
//! Instance sets are taken in the configured [`InstanceMode`].

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::store::{InstanceMode, NodeId, OntologyStore};
use crate::tsv;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MetricsConfig {
    pub mode: InstanceMode,
    /// Divide each `p(C)` by the sum over all subclasses before taking the
    /// entropy.
    pub normalize_entropy: bool,
}

/// Metrics of one `(parent, child)` subclass edge. `None` marks a metric
/// that is undefined for this row.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassMetrics {
    pub parent: NodeId,
    pub child: NodeId,
    pub ic_parent: usize,
    pub ic_child: usize,
    pub rr: Option<f64>,
    pub co: Option<f64>,
    pub largest_sibling: Option<NodeId>,
    pub h_parent: Option<f64>,
    pub mode: InstanceMode,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Overlap {
    pub value: f64,
    /// `None` when the class has no sibling; `value` is then 0.
    pub sibling: Option<NodeId>,
}

/// Size of the intersection of two sorted, deduplicated slices.
pub fn intersection_len(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Metric engine bound to one store and configuration.
#[derive(Clone, Copy)]
pub struct Metrics<'a> {
    store: &'a OntologyStore,
    config: MetricsConfig,
}

impl<'a> Metrics<'a> {
    pub fn new(store: &'a OntologyStore, config: MetricsConfig) -> Self {
        Self { store, config }
    }

    pub fn config(&self) -> MetricsConfig {
        self.config
    }

    fn members(&self, class: NodeId) -> Result<&'a [NodeId]> {
        Ok(self.store.instances_of(class, self.config.mode)?.members)
    }

    fn undefined(&self, metric: &'static str, class: NodeId, reason: &'static str) -> Error {
        Error::UndefinedMetric {
            metric,
            class: self.store.external(class).to_string(),
            reason,
        }
    }

    pub fn instance_count(&self, class: NodeId) -> Result<usize> {
        Ok(self.members(class)?.len())
    }

    pub fn reduction_ratio(&self, parent: NodeId, child: NodeId) -> Result<f64> {
        if !self.store.parents_of(child).contains(&parent) {
            return Err(Error::MissingSubclassEdge {
                subject: self.store.external(child).to_string(),
                object: self.store.external(parent).to_string(),
            });
        }
        let p = self.instance_count(parent)?;
        let c = self.instance_count(child)?;
        if p == 0 {
            return Err(self.undefined("RR", parent, "parent has no instances"));
        }
        Ok(1.0 - c as f64 / p as f64)
    }

    /// Overlap with the largest sibling under any parent of `class`.
    pub fn class_overlap(&self, class: NodeId) -> Result<Overlap> {
        let siblings = self.store.siblings_of(class)?;
        self.overlap_with_largest(class, &siblings)
    }

    /// Overlap with the largest sibling under one named parent.
    pub fn class_overlap_under(&self, parent: NodeId, class: NodeId) -> Result<Overlap> {
        let siblings: Vec<NodeId> = self
            .store
            .subclasses_of(parent)
            .iter()
            .copied()
            .filter(|&s| s != class)
            .collect();
        self.overlap_with_largest(class, &siblings)
    }

    fn overlap_with_largest(&self, class: NodeId, siblings: &[NodeId]) -> Result<Overlap> {
        let own = self.members(class)?;
        let mut best: Option<(NodeId, &[NodeId])> = None;
        // `siblings` is sorted, so keeping the first maximum prefers the smaller id.
        for &s in siblings {
            let members = self.members(s)?;
            if best.is_none_or(|(_, b)| members.len() > b.len()) {
                best = Some((s, members));
            }
        }
        let Some((sibling, other)) = best else {
            return Ok(Overlap {
                value: 0.0,
                sibling: None,
            });
        };
        let inter = intersection_len(own, other);
        let union = own.len() + other.len() - inter;
        if union == 0 {
            return Err(self.undefined("CO", class, "class and sibling have no instances"));
        }
        Ok(Overlap {
            value: inter as f64 / union as f64,
            sibling: Some(sibling),
        })
    }

    pub fn entropy(&self, parent: NodeId) -> Result<f64> {
        let children = self.store.subclasses_of(parent);
        if children.is_empty() {
            return Err(self.undefined("H", parent, "class has no subclasses"));
        }
        let total = self.instance_count(parent)?;
        if total == 0 {
            return Err(self.undefined("H", parent, "class has no instances"));
        }
        let mut probabilities = Vec::with_capacity(children.len());
        for &c in children {
            probabilities.push(self.instance_count(c)? as f64 / total as f64);
        }
        if self.config.normalize_entropy {
            let sum: f64 = probabilities.iter().sum();
            if sum > 0.0 {
                for p in &mut probabilities {
                    *p /= sum;
                }
            }
        }
        Ok(probabilities
            .into_iter()
            .filter(|&p| p > 0.0)
            .map(|p| -p * p.log2())
            .sum())
    }

    fn row(&self, parent: NodeId, child: NodeId) -> Result<ClassMetrics> {
        let defined = |r: Result<f64>| match r {
            Ok(v) => Ok(Some(v)),
            Err(Error::UndefinedMetric { .. }) => Ok(None),
            Err(e) => Err(e),
        };
        let overlap = match self.class_overlap_under(parent, child) {
            Ok(o) => Some(o),
            Err(Error::UndefinedMetric { .. }) => None,
            Err(e) => return Err(e),
        };
        let (co, largest_sibling) = match overlap {
            Some(Overlap {
                value,
                sibling: Some(s),
            }) => (Some(value), Some(s)),
            _ => (None, None),
        };
        Ok(ClassMetrics {
            parent,
            child,
            ic_parent: self.instance_count(parent)?,
            ic_child: self.instance_count(child)?,
            rr: defined(self.reduction_ratio(parent, child))?,
            co,
            largest_sibling,
            h_parent: defined(self.entropy(parent))?,
            mode: self.config.mode,
        })
    }

    /// One row per subclass edge, ordered by `(parent, child)`. Rows are
    /// computed in parallel; the order does not depend on scheduling.
    ///
    /// Only structural failures (a class inside a subclass cycle under the
    /// `error` policy) abort the table.
    pub fn table(&self) -> Result<Vec<ClassMetrics>> {
        let edges: Vec<(NodeId, NodeId)> = self.store.subclass_edges().collect();
        edges
            .par_iter()
            .map(|&(child, parent)| self.row(parent, child))
            .collect()
    }
}

pub const METRICS_HEADER: &str =
    "parent\tchild\tic_parent\tic_child\trr\tco\tlargest_sibling\th_parent";

pub fn write_metrics<W: Write>(
    store: &OntologyStore,
    rows: &[ClassMetrics],
    mut out: W,
) -> Result<()> {
    writeln!(out, "{METRICS_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            store.external(r.parent),
            store.external(r.child),
            r.ic_parent,
            r.ic_child,
            tsv::optional_real(r.rr),
            tsv::optional_real(r.co),
            r.largest_sibling.map_or("", |s| store.external(s)),
            tsv::optional_real(r.h_parent),
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::parse_edge_file;

    fn fix_a() -> OntologyStore {
        parse_edge_file(include_str!("../fixtures/fix_a.tsv").as_bytes()).unwrap()
    }

    fn engine(store: &OntologyStore, mode: InstanceMode) -> Metrics<'_> {
        Metrics::new(
            store,
            MetricsConfig {
                mode,
                normalize_entropy: false,
            },
        )
    }

    #[test]
    fn fix_a_values() {
        let s = fix_a();
        let m = engine(&s, InstanceMode::Transitive);
        let building = s.require("Q41176").unwrap();
        let house = s.require("Q3947").unwrap();
        let temple = s.require("Q44539").unwrap();
        assert_eq!(m.instance_count(house).unwrap(), 6);
        assert_eq!(
            engine(&s, InstanceMode::Direct)
                .instance_count(house)
                .unwrap(),
            4
        );
        assert_eq!(m.reduction_ratio(building, house).unwrap(), 0.5);
        let co = m.class_overlap(house).unwrap();
        assert_eq!(co.value, 0.125);
        assert_eq!(co.sibling, Some(temple));
        assert_eq!(m.entropy(building).unwrap(), 1.0);
    }

    #[test]
    fn table_rows_in_parent_child_order() {
        let s = fix_a();
        let rows = engine(&s, InstanceMode::Transitive).table().unwrap();
        let pairs: Vec<(&str, &str)> = rows
            .iter()
            .map(|r| (s.external(r.parent), s.external(r.child)))
            .collect();
        assert_eq!(
            pairs,
            [
                ("Q3947", "Q5783996"),
                ("Q41176", "Q3947"),
                ("Q41176", "Q44539")
            ]
        );
        // cottage is an only child: overlap is not measurable.
        assert_eq!(rows[0].co, None);
        assert_eq!(rows[0].largest_sibling, None);
        assert_eq!(
            rows[0].h_parent,
            Some(0.0 + -(2.0f64 / 6.0) * (2.0f64 / 6.0).log2())
        );
    }

    #[test]
    fn empty_store_gives_empty_table() {
        let s = parse_edge_file("id\tnode1\tlabel\tnode2\n".as_bytes()).unwrap();
        assert!(engine(&s, InstanceMode::Transitive)
            .table()
            .unwrap()
            .is_empty());
    }

    #[test]
    fn rr_edge_cases() {
        let s = parse_edge_file(
            "id\tnode1\tlabel\tnode2\n\
             s1\tQ2\tP279\tQ1\n\
             s2\tQ3\tP279\tQ1\n\
             s3\tQ4\tP279\tQ5\n\
             i1\tQ10\tP31\tQ2\n\
             i2\tQ11\tP31\tQ2\n"
                .as_bytes(),
        )
        .unwrap();
        let m = engine(&s, InstanceMode::Transitive);
        let [q1, q2, q3, q4, q5] = ["Q1", "Q2", "Q3", "Q4", "Q5"].map(|n| s.require(n).unwrap());
        assert_eq!(m.reduction_ratio(q1, q2).unwrap(), 0.0);
        assert_eq!(m.reduction_ratio(q1, q3).unwrap(), 1.0);
        assert!(matches!(
            m.reduction_ratio(q5, q4),
            Err(Error::UndefinedMetric { metric: "RR", .. })
        ));
        assert!(matches!(
            m.reduction_ratio(q1, q4),
            Err(Error::MissingSubclassEdge { .. })
        ));
        // CO: Q3 (empty) vs largest sibling Q2 is disjoint.
        assert_eq!(m.class_overlap(q3).unwrap().value, 0.0);
        // A class alone under its parent has no sibling.
        assert_eq!(
            m.class_overlap(q4).unwrap(),
            Overlap {
                value: 0.0,
                sibling: None
            }
        );
        // Single subclass holding everything: zero entropy.
        assert_eq!(m.entropy(q1).unwrap(), 0.0);
        assert!(m.entropy(q2).is_err());
        assert!(m.entropy(q5).is_err());
    }

    #[test]
    fn identical_and_empty_overlaps() {
        let s = parse_edge_file(
            "id\tnode1\tlabel\tnode2\n\
             s1\tQ2\tP279\tQ1\n\
             s2\tQ3\tP279\tQ1\n\
             s3\tQ6\tP279\tQ5\n\
             s4\tQ7\tP279\tQ5\n\
             i1\tQ10\tP31\tQ2\n\
             i2\tQ10\tP31\tQ3\n"
                .as_bytes(),
        )
        .unwrap();
        let m = engine(&s, InstanceMode::Transitive);
        let q2 = s.require("Q2").unwrap();
        let q6 = s.require("Q6").unwrap();
        assert_eq!(m.class_overlap(q2).unwrap().value, 1.0);
        assert!(matches!(
            m.class_overlap(q6),
            Err(Error::UndefinedMetric { metric: "CO", .. })
        ));
    }

    #[test]
    fn two_balanced_children_have_one_bit() {
        let s = parse_edge_file(
            "id\tnode1\tlabel\tnode2\n\
             s1\tQ2\tP279\tQ1\n\
             s2\tQ3\tP279\tQ1\n\
             i1\tQ10\tP31\tQ2\n\
             i2\tQ11\tP31\tQ3\n"
                .as_bytes(),
        )
        .unwrap();
        let m = engine(&s, InstanceMode::Transitive);
        assert_eq!(m.entropy(s.require("Q1").unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn normalized_entropy_renormalizes_overlapping_children() {
        // Q2 and Q3 both hold the single parent instance: p = (1, 1).
        let s = parse_edge_file(
            "id\tnode1\tlabel\tnode2\n\
             s1\tQ2\tP279\tQ1\n\
             s2\tQ3\tP279\tQ1\n\
             i1\tQ10\tP31\tQ2\n\
             i2\tQ10\tP31\tQ3\n"
                .as_bytes(),
        )
        .unwrap();
        let q1 = s.require("Q1").unwrap();
        assert_eq!(
            engine(&s, InstanceMode::Transitive).entropy(q1).unwrap(),
            0.0
        );
        let normalized = Metrics::new(
            &s,
            MetricsConfig {
                mode: InstanceMode::Transitive,
                normalize_entropy: true,
            },
        );
        assert_eq!(normalized.entropy(q1).unwrap(), 1.0);
    }

    #[test]
    fn tsv_uses_empty_fields_for_nulls() {
        let s = fix_a();
        let rows = engine(&s, InstanceMode::Transitive).table().unwrap();
        let mut buf = Vec::new();
        write_metrics(&s, &rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], METRICS_HEADER);
        assert_eq!(lines[1], "Q3947\tQ5783996\t6\t2\t0.666667\t\t\t0.528321");
        assert_eq!(
            lines[2],
            "Q41176\tQ3947\t12\t6\t0.500000\t0.125000\tQ44539\t1.000000"
        );
    }
}
