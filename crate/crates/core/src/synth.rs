//! Deterministic synthetic inputs: random class hierarchies, a small
//! categorised benchmark ontology with matching word vectors, and large
//! edge files for throughput checks.

use std::fmt::Write as _;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::probe::InheritanceCategory;

/// Random acyclic hierarchy. Classes are `Q{1 + i}`, instances
/// `Q{INSTANCE_BASE + j}`; a class only points at classes with a smaller
/// index, so the subclass graph is a DAG.
#[derive(Clone, Debug)]
pub struct RandomOntology {
    pub class_parents: Vec<Vec<usize>>,
    pub memberships: Vec<Vec<usize>>,
}

pub const INSTANCE_BASE: usize = 1_000_000;

#[derive(Clone, Copy, Debug)]
pub struct RandomOntologyParams {
    pub max_classes: usize,
    pub max_instances: usize,
    pub max_parents: usize,
    pub max_memberships: usize,
}

impl Default for RandomOntologyParams {
    fn default() -> Self {
        Self {
            max_classes: 1000,
            max_instances: 10_000,
            max_parents: 3,
            max_memberships: 3,
        }
    }
}

impl RandomOntology {
    pub fn generate(params: RandomOntologyParams, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_classes = rng.random_range(1..=params.max_classes.max(1));
        let n_instances = rng.random_range(0..=params.max_instances);
        // A few roots; every other class takes one uniformly chosen earlier
        // class as parent and sometimes a few more, keeping depth logarithmic.
        let mut class_parents = vec![Vec::new(); n_classes];
        for (i, parents) in class_parents.iter_mut().enumerate().skip(1) {
            if rng.random_bool(0.05) {
                continue;
            }
            parents.push(rng.random_range(0..i));
            while parents.len() < params.max_parents.min(i) && rng.random_bool(0.25) {
                let p = rng.random_range(0..i);
                if !parents.contains(&p) {
                    parents.push(p);
                }
            }
            parents.sort_unstable();
        }
        let memberships = (0..n_instances)
            .map(|_| {
                let k = rng.random_range(1..=params.max_memberships.max(1).min(n_classes));
                let mut cs: Vec<usize> = Vec::with_capacity(k);
                while cs.len() < k {
                    let c = rng.random_range(0..n_classes);
                    if !cs.contains(&c) {
                        cs.push(c);
                    }
                }
                cs.sort_unstable();
                cs
            })
            .collect();
        Self {
            class_parents,
            memberships,
        }
    }

    pub fn class_id(i: usize) -> String {
        format!("Q{}", i + 1)
    }

    pub fn instance_id(j: usize) -> String {
        format!("Q{}", INSTANCE_BASE + j)
    }

    pub fn class_count(&self) -> usize {
        self.class_parents.len()
    }

    pub fn edge_file(&self) -> String {
        let mut out = String::from("id\tnode1\tlabel\tnode2\n");
        let mut n = 0usize;
        for (i, parents) in self.class_parents.iter().enumerate() {
            for &p in parents {
                n += 1;
                let _ = writeln!(
                    out,
                    "e{n}\t{}\tP279\t{}",
                    Self::class_id(i),
                    Self::class_id(p)
                );
            }
        }
        for (j, classes) in self.memberships.iter().enumerate() {
            for &c in classes {
                n += 1;
                let _ = writeln!(
                    out,
                    "e{n}\t{}\tP31\t{}",
                    Self::instance_id(j),
                    Self::class_id(c)
                );
            }
        }
        out
    }
}

/// One seed pair of the synthetic benchmark ontology.
#[derive(Clone, Debug)]
pub struct SyntheticSeed {
    pub child: String,
    pub parent: String,
    pub category: InheritanceCategory,
}

/// Root `entity` (Q35120) over three domains, each with two groups of two
/// head classes; every head has five seed children. Within a head the
/// seeds use the domain's category twice and the group's category three
/// times, which yields plenty of direct, parent and distant positives.
#[derive(Clone, Debug)]
pub struct BenchmarkOntology {
    labels: Vec<(String, &'static str)>,
    edges: Vec<(String, String)>,
    pub seeds: Vec<SyntheticSeed>,
}

const DOMAIN_WORDS: [&str; 3] = ["object", "organism", "place"];
const GROUP_WORDS: [&str; 6] = ["tool", "vehicle", "animal", "plant", "building", "region"];
const HEAD_WORDS: [&str; 12] = [
    "knife", "hammer", "car", "boat", "dog", "bird", "tree", "flower", "house", "tower", "valley",
    "island",
];
#[rustfmt::skip]
const SEED_WORDS: [&str; 60] = [
    "sword", "dagger", "scalpel", "razor", "cleaver", "mallet", "axe", "pick", "chisel",
    "anvil", "truck", "taxi", "jeep", "van", "bus", "canoe", "yacht", "ferry", "raft", "barge",
    "puppy", "hound", "terrier", "collie", "poodle", "eagle", "parrot", "sparrow", "owl",
    "robin", "oak", "pine", "maple", "willow", "birch", "rose", "tulip", "lily", "daisy",
    "orchid", "cottage", "cabin", "mansion", "villa", "hut", "castle", "lighthouse", "steeple",
    "minaret", "spire", "canyon", "gorge", "ravine", "basin", "glen", "atoll", "islet",
    "peninsula", "reef", "archipelago",
];

impl BenchmarkOntology {
    pub const ROOT: &'static str = "Q35120";

    pub fn new() -> Self {
        use InheritanceCategory::*;
        let domain_cat = [Purpose, Property, Location];
        let group_cat = [Ownership, Material, Instance, Temporal, Ownership, Material];
        let mut labels = vec![(Self::ROOT.to_string(), "entity")];
        let mut edges = Vec::new();
        let mut seeds = Vec::new();
        for d in 0..3 {
            let dom = format!("Q{}", 96_000_001 + d);
            labels.push((dom.clone(), DOMAIN_WORDS[d]));
            edges.push((dom.clone(), Self::ROOT.to_string()));
            for g in 0..2 {
                let gi = 2 * d + g;
                let grp = format!("Q{}", 96_000_101 + gi);
                labels.push((grp.clone(), GROUP_WORDS[gi]));
                edges.push((grp.clone(), dom.clone()));
                for h in 0..2 {
                    let hi = 2 * gi + h;
                    let head = format!("Q{}", 96_000_201 + hi);
                    labels.push((head.clone(), HEAD_WORDS[hi]));
                    edges.push((head.clone(), grp.clone()));
                    for s in 0..5 {
                        let si = 5 * hi + s;
                        let child = format!("Q{}", 96_001_001 + si);
                        labels.push((child.clone(), SEED_WORDS[si]));
                        edges.push((child.clone(), head.clone()));
                        seeds.push(SyntheticSeed {
                            child,
                            parent: head.clone(),
                            category: if s < 2 { domain_cat[d] } else { group_cat[gi] },
                        });
                    }
                }
            }
        }
        Self {
            labels,
            edges,
            seeds,
        }
    }

    pub fn edge_file(&self) -> String {
        let mut out = String::from("id\tnode1\tlabel\tnode2\n");
        for (i, (c, p)) in self.edges.iter().enumerate() {
            let _ = writeln!(out, "b{}\t{c}\tP279\t{p}", i + 1);
        }
        for (id, word) in &self.labels {
            let _ = writeln!(out, "{id}-label\t{id}\tlabel\t\"{word}\"@en");
        }
        out
    }

    pub fn annotation_file(&self) -> String {
        let mut out = format!("{}\n", crate::probe::ANNOTATION_HEADER);
        for s in &self.seeds {
            let _ = writeln!(out, "{}\t{}\t{}", s.child, s.parent, s.category);
        }
        out
    }

    pub fn label(&self, id: &str) -> Option<&'static str> {
        self.labels.iter().find(|(i, _)| i == id).map(|(_, w)| *w)
    }

    /// Word vectors for every label. Each seed's difference vector is
    /// `e_category + shared * u + noise`, with `e_*` and `u` orthonormal, so
    /// same-category quads score close to 1 and cross-category quads close
    /// to `shared² / (1 + shared²)`.
    pub fn embedding_file(&self, dim: usize, shared: f64, noise: f64, seed: u64) -> String {
        let axes = InheritanceCategory::ALL.len() + 1;
        assert!(dim > axes, "need more than {axes} dimensions");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut vectors: Vec<(&'static str, Vec<f64>)> = Vec::new();
        for (id, word) in &self.labels {
            let is_seed = self.seeds.iter().any(|s| &s.child == id);
            if is_seed {
                continue;
            }
            let mut v = vec![0.0; dim];
            for x in &mut v[axes..] {
                *x = rng.random_range(-1.0..1.0);
            }
            vectors.push((word, v));
        }
        for s in &self.seeds {
            let parent = self.label(&s.parent).expect("head has a label");
            let base = vectors
                .iter()
                .find(|(w, _)| *w == parent)
                .map(|(_, v)| v.clone())
                .expect("head vector exists");
            let cat = InheritanceCategory::ALL
                .iter()
                .position(|c| *c == s.category)
                .expect("known category");
            let mut v = base;
            v[cat] += 1.0;
            v[axes - 1] += shared;
            for x in &mut v {
                *x += noise * rng.random_range(-1.0..1.0);
            }
            vectors.push((self.label(&s.child).expect("seed has a label"), v));
        }
        let mut out = format!("{} {dim}\n", vectors.len());
        for (w, v) in vectors {
            out.push_str(w);
            for x in v {
                let _ = write!(out, " {x:.6}");
            }
            out.push('\n');
        }
        out
    }
}

impl Default for BenchmarkOntology {
    fn default() -> Self {
        Self::new()
    }
}

/// Write an edge file of exactly `rows` data rows: a random class
/// hierarchy of about `rows / 50` classes, `P31` memberships for the rest
/// and labels for every class. Returns the number of classes.
pub fn write_scale_edges<W: Write>(rows: usize, seed: u64, out: W) -> io::Result<usize> {
    let mut out = io::BufWriter::new(out);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_classes = (rows / 50).max(2);
    writeln!(out, "id\tnode1\tlabel\tnode2")?;
    let mut written = 0usize;
    for i in 0..n_classes {
        if written == rows {
            break;
        }
        writeln!(out, "c{i}-label\tQ{}\tlabel\t\"class {i}\"@en", i + 1)?;
        written += 1;
        if i == 0 || written == rows {
            continue;
        }
        let p = rng.random_range(0..i);
        writeln!(out, "c{i}\tQ{}\tP279\tQ{}", i + 1, p + 1)?;
        written += 1;
        if written < rows && i > 1 && rng.random_bool(0.2) {
            let q = rng.random_range(0..i);
            if q != p {
                writeln!(out, "d{i}\tQ{}\tP279\tQ{}", i + 1, q + 1)?;
                written += 1;
            }
        }
    }
    let mut j = 0usize;
    while written < rows {
        let c = rng.random_range(0..n_classes);
        writeln!(out, "m{j}\tQ{}\tP31\tQ{}", INSTANCE_BASE + j / 2, c + 1)?;
        written += 1;
        j += 1;
    }
    out.flush()?;
    Ok(n_classes)
}
