//! Proportional-analogy datasets built from categorised subclass pairs.
//!
//! A quad joins two seed pairs `child1:parent1 :: child2:parent2`.
//! Positive quads join two pairs of the same inheritance category whose
//! parents are identical (`direct`), share a direct superclass (`parent`)
//! or share an ancestor a few hops up (`distant`). Negative quads join
//! pairs of different categories.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::probe::{Annotations, InheritanceCategory};
use crate::store::{NodeId, OntologyStore};
use crate::tsv;

/// `(child, parent)` subclass pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair {
    pub child: NodeId,
    pub parent: NodeId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedPair {
    pub pair: Pair,
    pub category: InheritanceCategory,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PosType {
    Direct,
    Parent,
    Distant,
    None,
}

impl PosType {
    pub fn as_str(self) -> &'static str {
        match self {
            PosType::Direct => "direct",
            PosType::Parent => "parent",
            PosType::Distant => "distant",
            PosType::None => "none",
        }
    }
}

impl fmt::Display for PosType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for PosType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(PosType::Direct),
            "parent" => Ok(PosType::Parent),
            "distant" => Ok(PosType::Distant),
            "none" => Ok(PosType::None),
            other => Err(Error::InvalidArgument(format!(
                "unknown pos_type `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnalogyQuad {
    pub pair1: Pair,
    pub pair2: Pair,
    pub positive: bool,
    pub pos_type: PosType,
    pub category1: InheritanceCategory,
    pub category2: InheritanceCategory,
}

impl AnalogyQuad {
    /// Identity with the two pairs unordered.
    pub fn key(&self) -> (Pair, Pair) {
        if self.pair1 <= self.pair2 {
            (self.pair1, self.pair2)
        } else {
            (self.pair2, self.pair1)
        }
    }
}

/// Requested quads per bucket.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadCounts {
    pub direct: usize,
    pub parent: usize,
    pub distant: usize,
    pub negative: usize,
}

impl Default for QuadCounts {
    fn default() -> Self {
        Self {
            direct: 25,
            parent: 50,
            distant: 25,
            negative: 100,
        }
    }
}

impl QuadCounts {
    pub fn total(&self) -> usize {
        self.direct + self.parent + self.distant + self.negative
    }
}

pub const DEFAULT_STOPLIST: &[&str] = &["Q35120"];

/// Which shared ancestors make two parents "distant" relatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relatedness {
    pub max_distance: usize,
    /// Top-of-ontology classes that never count as a shared ancestor.
    pub stoplist: BTreeSet<NodeId>,
}

impl Relatedness {
    /// Resolve a stoplist of external ids; ids absent from the store are
    /// dropped since they cannot be ancestors anyway.
    pub fn new(store: &OntologyStore, max_distance: usize, stoplist: &[impl AsRef<str>]) -> Self {
        Self {
            max_distance,
            stoplist: stoplist
                .iter()
                .filter_map(|s| store.node(s.as_ref()))
                .collect(),
        }
    }
}

fn check_pair(store: &OntologyStore, pair: Pair) -> Result<()> {
    for n in [pair.child, pair.parent] {
        if n.index() >= store.node_count() {
            return Err(Error::UnknownNode(format!("#{}", n.index())));
        }
    }
    Ok(())
}

/// Structural relation between the parents of two pairs. Categories are
/// not consulted.
pub fn classify_pos_type(
    store: &OntologyStore,
    pair1: Pair,
    pair2: Pair,
    relatedness: &Relatedness,
) -> Result<PosType> {
    check_pair(store, pair1)?;
    check_pair(store, pair2)?;
    let (p1, p2) = (pair1.parent, pair2.parent);
    if p1 == p2 {
        return Ok(PosType::Direct);
    }
    let grand2 = store.parents_of(p2);
    if store.parents_of(p1).iter().any(|g| grand2.contains(g)) {
        return Ok(PosType::Parent);
    }
    let up1 = store.ancestors_within(p1, relatedness.max_distance)?;
    let up2 = store.ancestors_within(p2, relatedness.max_distance)?;
    let shared = up1
        .keys()
        .any(|a| up2.contains_key(a) && !relatedness.stoplist.contains(a));
    Ok(if shared {
        PosType::Distant
    } else {
        PosType::None
    })
}

/// Resolve seed pairs and attach their categories.
///
/// With `pairs == None` every annotated pair is a seed. Every seed must be
/// an existing subclass edge and must carry an annotation.
pub fn resolve_seeds(
    store: &OntologyStore,
    annotations: &Annotations,
    pairs: Option<&[(String, String)]>,
) -> Result<Vec<SeedPair>> {
    let listed: Vec<(String, String)> = match pairs {
        Some(p) => p.to_vec(),
        None => annotations
            .entries()
            .iter()
            .map(|a| (a.subject.clone(), a.object.clone()))
            .collect(),
    };
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (child, parent) in listed {
        let category = annotations
            .get(&child, &parent)
            .ok_or_else(|| Error::UnannotatedSeed {
                child: child.clone(),
                parent: parent.clone(),
            })?;
        let c = store.require(&child)?;
        let p = store.require(&parent)?;
        if store.subclass_statement(c, p).is_none() {
            return Err(Error::MissingSubclassEdge {
                subject: child,
                object: parent,
            });
        }
        let pair = Pair {
            child: c,
            parent: p,
        };
        if seen.insert(pair) {
            out.push(SeedPair { pair, category });
        }
    }
    Ok(out)
}

pub const SEEDS_HEADER: &str = "child\tparent";

/// Parse a seed list (`child<TAB>parent`, external ids).
pub fn read_seed_pairs<R: BufRead>(reader: R) -> Result<Vec<(String, String)>> {
    tsv::read_rows(reader, SEEDS_HEADER)?
        .into_iter()
        .map(
            |(line, row)| match row.split('\t').collect::<Vec<_>>()[..] {
                [c, p] => Ok((c.to_string(), p.to_string())),
                _ => Err(Error::Parse {
                    line,
                    message: "expected 2 columns".into(),
                }),
            },
        )
        .collect()
}

/// Sample a labelled dataset. Output order: direct, parent, distant
/// positives, then negatives; each bucket sampled without replacement
/// with a ChaCha8 generator seeded by `rng_seed`.
pub fn build_quads(
    store: &OntologyStore,
    seeds: &[SeedPair],
    counts: QuadCounts,
    rng_seed: u64,
    relatedness: &Relatedness,
) -> Result<Vec<AnalogyQuad>> {
    let mut buckets: BTreeMap<PosType, Vec<AnalogyQuad>> = BTreeMap::new();
    let mut memo: HashMap<(NodeId, NodeId), PosType> = HashMap::new();
    for (i, s1) in seeds.iter().enumerate() {
        for s2 in &seeds[i + 1..] {
            if s1.pair == s2.pair {
                continue;
            }
            let same = s1.category == s2.category;
            let pos_type = if same {
                let key = (
                    s1.pair.parent.min(s2.pair.parent),
                    s1.pair.parent.max(s2.pair.parent),
                );
                match memo.get(&key) {
                    Some(&t) => t,
                    None => {
                        let t = classify_pos_type(store, s1.pair, s2.pair, relatedness)?;
                        memo.insert(key, t);
                        t
                    }
                }
            } else {
                PosType::None
            };
            if same && pos_type == PosType::None {
                continue;
            }
            buckets.entry(pos_type).or_default().push(AnalogyQuad {
                pair1: s1.pair,
                pair2: s2.pair,
                positive: same,
                pos_type,
                category1: s1.category,
                category2: s2.category,
            });
        }
    }

    let plan = [
        (PosType::Direct, "direct", counts.direct),
        (PosType::Parent, "parent", counts.parent),
        (PosType::Distant, "distant", counts.distant),
        (PosType::None, "negative", counts.negative),
    ];
    for (kind, name, wanted) in plan {
        let available = buckets.get(&kind).map_or(0, Vec::len);
        if available < wanted {
            return Err(Error::Shortfall {
                bucket: name,
                requested: wanted,
                available,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut out = Vec::with_capacity(counts.total());
    for (kind, _, wanted) in plan {
        let Some(pool) = buckets.get_mut(&kind) else {
            continue;
        };
        let (chosen, _) = pool.partial_shuffle(&mut rng, wanted);
        out.extend_from_slice(chosen);
    }
    Ok(out)
}

/// Re-check a (possibly hand-edited) dataset: subclass edges exist,
/// labels agree with categories, recorded pos_types agree with the
/// hierarchy, and no quad repeats.
pub fn validate_quads(
    store: &OntologyStore,
    quads: &[AnalogyQuad],
    relatedness: &Relatedness,
) -> Result<()> {
    let mut seen = HashSet::new();
    for (index, q) in quads.iter().enumerate() {
        let invalid = |reason: String| Error::InvalidQuad { index, reason };
        for pair in [q.pair1, q.pair2] {
            check_pair(store, pair)?;
            if store.subclass_statement(pair.child, pair.parent).is_none() {
                return Err(invalid(format!(
                    "{} is not a subclass of {}",
                    store.external(pair.child),
                    store.external(pair.parent)
                )));
            }
        }
        if q.pair1 == q.pair2 {
            return Err(invalid("both pairs are identical".into()));
        }
        if !seen.insert(q.key()) {
            return Err(invalid("duplicate quad".into()));
        }
        if q.positive {
            if q.category1 != q.category2 {
                return Err(invalid("positive quad with different categories".into()));
            }
            if q.pos_type == PosType::None {
                return Err(invalid("positive quad without a pos_type".into()));
            }
            let actual = classify_pos_type(store, q.pair1, q.pair2, relatedness)?;
            if actual != q.pos_type {
                return Err(invalid(format!(
                    "recorded pos_type {} but the hierarchy gives {}",
                    q.pos_type, actual
                )));
            }
        } else {
            if q.pos_type != PosType::None {
                return Err(invalid("negative quad with a pos_type".into()));
            }
            if q.category1 == q.category2 {
                return Err(invalid("negative quad with equal categories".into()));
            }
        }
    }
    Ok(())
}

/// Positives per `category1`, with every category present.
pub fn category_distribution(quads: &[AnalogyQuad]) -> BTreeMap<InheritanceCategory, usize> {
    let mut out: BTreeMap<_, _> = InheritanceCategory::ALL.iter().map(|&c| (c, 0)).collect();
    for q in quads.iter().filter(|q| q.positive) {
        *out.entry(q.category1).or_default() += 1;
    }
    out
}

pub const DATASET_HEADER: &str =
    "child1\tparent1\tchild2\tparent2\tlabel\tpos_type\tcategory1\tcategory2";

pub fn write_dataset<W: Write>(
    store: &OntologyStore,
    quads: &[AnalogyQuad],
    mut out: W,
) -> Result<()> {
    writeln!(out, "{DATASET_HEADER}")?;
    for q in quads {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            store.external(q.pair1.child),
            store.external(q.pair1.parent),
            store.external(q.pair2.child),
            store.external(q.pair2.parent),
            u8::from(q.positive),
            q.pos_type,
            q.category1,
            q.category2
        )?;
    }
    Ok(())
}

pub fn read_dataset<R: BufRead>(store: &OntologyStore, reader: R) -> Result<Vec<AnalogyQuad>> {
    let mut out = Vec::new();
    for (line, row) in tsv::read_rows(reader, DATASET_HEADER)? {
        let parse_err = |message: String| Error::Parse { line, message };
        let fields: Vec<&str> = row.split('\t').collect();
        let [c1, p1, c2, p2, label, pos_type, cat1, cat2] = fields[..] else {
            return Err(parse_err(format!(
                "expected 8 columns, found {}",
                fields.len()
            )));
        };
        let node = |s: &str| store.require(s).map_err(|e| parse_err(e.to_string()));
        let positive = match label {
            "1" => true,
            "0" => false,
            other => return Err(parse_err(format!("label must be 1 or 0, found `{other}`"))),
        };
        let wrap = |e: Error| parse_err(e.to_string());
        out.push(AnalogyQuad {
            pair1: Pair {
                child: node(c1)?,
                parent: node(p1)?,
            },
            pair2: Pair {
                child: node(c2)?,
                parent: node(p2)?,
            },
            positive,
            pos_type: pos_type.parse().map_err(wrap)?,
            category1: cat1.parse().map_err(wrap)?,
            category2: cat2.parse().map_err(wrap)?,
        });
    }
    Ok(out)
}

pub fn write_distribution<W: Write>(
    distribution: &BTreeMap<InheritanceCategory, usize>,
    mut out: W,
) -> Result<()> {
    writeln!(out, "category\tcount")?;
    for (c, n) in distribution {
        writeln!(out, "{c}\t{n}")?;
    }
    Ok(())
}
