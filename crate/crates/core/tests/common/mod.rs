#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use analogion::metrics::{ClassMetrics, Metrics, MetricsConfig};
use analogion::synth::RandomOntology;
use analogion::OntologyStore;
use num_rational::Ratio;

pub type Q = Ratio<i64>;

/// Metrics for one subclass edge, computed by brute force.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleRow {
    pub ic_parent: usize,
    pub ic_child: usize,
    pub rr: Option<Q>,
    pub co: Option<Q>,
    pub largest_sibling: Option<usize>,
    pub h_parent: Option<f64>,
}

/// Instance sets by walking upward from every instance through every
/// superclass path, without any shared structure.
pub fn transitive_sets(onto: &RandomOntology) -> Vec<BTreeSet<usize>> {
    let mut sets = vec![BTreeSet::new(); onto.class_count()];
    for (j, classes) in onto.memberships.iter().enumerate() {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<usize> = classes.clone();
        while let Some(c) = stack.pop() {
            if seen.insert(c) {
                stack.extend(onto.class_parents[c].iter().copied());
            }
        }
        for c in seen {
            sets[c].insert(j);
        }
    }
    sets
}

pub fn direct_sets(onto: &RandomOntology) -> Vec<BTreeSet<usize>> {
    let mut sets = vec![BTreeSet::new(); onto.class_count()];
    for (j, classes) in onto.memberships.iter().enumerate() {
        for &c in classes {
            sets[c].insert(j);
        }
    }
    sets
}

pub fn children(onto: &RandomOntology) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); onto.class_count()];
    for (c, parents) in onto.class_parents.iter().enumerate() {
        for &p in parents {
            out[p].push(c);
        }
    }
    out
}

pub fn oracle_rows(
    onto: &RandomOntology,
    sets: &[BTreeSet<usize>],
) -> BTreeMap<(usize, usize), OracleRow> {
    let kids = children(onto);
    let mut rows = BTreeMap::new();
    for (child, parents) in onto.class_parents.iter().enumerate() {
        for &parent in parents {
            let p = sets[parent].len() as i64;
            let c = sets[child].len() as i64;
            let rr = (p > 0).then(|| Q::from_integer(1) - Q::new(c, p));

            let mut best: Option<usize> = None;
            for &s in kids[parent].iter().filter(|&&s| s != child) {
                if best.is_none_or(|b| {
                    sets[s].len() > sets[b].len() || (sets[s].len() == sets[b].len() && s < b)
                }) {
                    best = Some(s);
                }
            }
            let (co, largest_sibling) = match best {
                Some(s) => {
                    let inter = sets[child].intersection(&sets[s]).count() as i64;
                    let union = sets[child].union(&sets[s]).count() as i64;
                    if union == 0 {
                        (None, None)
                    } else {
                        (Some(Q::new(inter, union)), Some(s))
                    }
                }
                None => (None, None),
            };

            let h_parent = if kids[parent].is_empty() || p == 0 {
                None
            } else {
                let mut h = 0.0;
                for &k in &kids[parent] {
                    let prob = Q::new(sets[k].len() as i64, p);
                    if *prob.numer() > 0 {
                        let x = *prob.numer() as f64 / *prob.denom() as f64;
                        h -= x * x.log2();
                    }
                }
                Some(h)
            };
            rows.insert(
                (child, parent),
                OracleRow {
                    ic_parent: p as usize,
                    ic_child: c as usize,
                    rr,
                    co,
                    largest_sibling,
                    h_parent,
                },
            );
        }
    }
    rows
}

fn class_index(store: &OntologyStore, id: analogion::NodeId) -> usize {
    store.external(id)[1..].parse::<usize>().unwrap() - 1
}

fn close(a: Option<f64>, b: Option<Q>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(q)) => (x - *q.numer() as f64 / *q.denom() as f64).abs() <= 1e-12,
        _ => false,
    }
}

/// Compare the engine's table against the oracle; `Err` describes the
/// first difference.
pub fn compare(
    onto: &RandomOntology,
    store: &OntologyStore,
    config: MetricsConfig,
) -> Result<usize, String> {
    let sets = match config.mode {
        analogion::InstanceMode::Transitive => transitive_sets(onto),
        analogion::InstanceMode::Direct => direct_sets(onto),
    };
    let expected = oracle_rows(onto, &sets);
    let table: Vec<ClassMetrics> = Metrics::new(store, config)
        .table()
        .map_err(|e| e.to_string())?;
    if table.len() != expected.len() {
        return Err(format!(
            "{} rows, oracle has {}",
            table.len(),
            expected.len()
        ));
    }
    for row in &table {
        let key = (
            class_index(store, row.child),
            class_index(store, row.parent),
        );
        let want = expected
            .get(&key)
            .ok_or_else(|| format!("unexpected edge {key:?}"))?;
        let sibling = row.largest_sibling.map(|s| class_index(store, s));
        let h_ok = match (row.h_parent, want.h_parent) {
            (None, None) => true,
            (Some(a), Some(b)) => (a - b).abs() <= 1e-12,
            _ => false,
        };
        if row.ic_parent != want.ic_parent
            || row.ic_child != want.ic_child
            || !close(row.rr, want.rr)
            || !close(row.co, want.co)
            || sibling != want.largest_sibling
            || !h_ok
        {
            return Err(format!("edge {key:?}: engine {row:?} vs oracle {want:?}"));
        }
    }
    Ok(table.len())
}
