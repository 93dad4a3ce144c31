//! Scoring analogy quads with word vectors and picking a decision threshold.
//!
//! A quad `c1:p1 :: c2:p2` scores `cos(v(c1) - v(p1), v(c2) - v(p2))` and is
//! predicted analogical when the score is strictly above the threshold.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::benchmark::{AnalogyQuad, Pair};
use crate::error::{Error, Result};
use crate::store::{NodeId, OntologyStore};
use crate::tsv;

pub const DEFAULT_GRID_STEP: f64 = 0.05;
pub const DEFAULT_CV_FOLDS: usize = 5;
pub const DEFAULT_HIST_WIDTH: f64 = 0.1;

/// Word vectors keyed by lowercased token.
#[derive(Clone, Debug)]
pub struct EmbeddingTable {
    dimension: usize,
    declared_count: usize,
    vectors: HashMap<String, Vec<f32>>,
}

impl EmbeddingTable {
    /// Read the text format: a `<count> <dimension>` header, then one
    /// `<token> <c1> ... <cdim>` row per vector.
    pub fn load<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines.next().transpose()?.ok_or_else(|| Error::Header {
            expected: "<count> <dimension>".into(),
        })?;
        let malformed_header = || Error::Parse {
            line: 1,
            message: format!(
                "expected `<count> <dimension>`, found `{}`",
                header.trim_end()
            ),
        };
        let mut fields = header.split_whitespace();
        let (Some(count), Some(dim), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(malformed_header());
        };
        let declared_count: usize = count.parse().map_err(|_| malformed_header())?;
        let dimension: usize = dim.parse().map_err(|_| malformed_header())?;
        if dimension == 0 {
            return Err(malformed_header());
        }

        let mut vectors = HashMap::with_capacity(declared_count);
        for (i, line) in lines.enumerate() {
            let line_no = i + 2;
            let line = line?;
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let mut parts = line.split(' ');
            let token = parts.next().unwrap_or_default().to_lowercase();
            let values = parts
                .map(|c| {
                    c.parse::<f32>()
                        .map_err(|_| err(format!("non-numeric component `{c}`")))
                })
                .collect::<Result<Vec<f32>>>()?;
            if values.len() != dimension {
                return Err(err(format!(
                    "expected {dimension} components, found {}",
                    values.len()
                )));
            }
            if vectors.contains_key(&token) {
                return Err(err(format!("duplicate token `{token}`")));
            }
            vectors.insert(token, values);
        }
        Ok(Self {
            dimension,
            declared_count,
            vectors,
        })
    }

    pub fn from_vectors<I, S>(dimension: usize, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<f32>)>,
        S: AsRef<str>,
    {
        let mut vectors = HashMap::new();
        for (token, v) in rows {
            let token = token.as_ref().to_lowercase();
            if v.len() != dimension {
                return Err(Error::InvalidArgument(format!(
                    "vector for `{token}` has {} components, expected {dimension}",
                    v.len()
                )));
            }
            if vectors.insert(token.clone(), v).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate token `{token}`")));
            }
        }
        Ok(Self {
            dimension,
            declared_count: vectors.len(),
            vectors,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn declared_count(&self) -> usize {
        self.declared_count
    }

    /// `Some((declared, actual))` when the header count was wrong.
    pub fn count_mismatch(&self) -> Option<(usize, usize)> {
        (self.declared_count != self.len()).then_some((self.declared_count, self.len()))
    }

    pub fn get(&self, token: &str) -> Option<&[f32]> {
        self.vectors.get(token).map(Vec::as_slice)
    }
}

/// Mean of the in-vocabulary token vectors of a lowercased label.
pub fn phrase_vector(label: &str, table: &EmbeddingTable) -> Option<Vec<f64>> {
    let mut sum = vec![0.0f64; table.dimension()];
    let mut n = 0usize;
    for token in label.to_lowercase().split_whitespace() {
        if let Some(v) = table.get(token) {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += f64::from(*x);
            }
            n += 1;
        }
    }
    if n == 0 {
        return None;
    }
    sum.iter_mut().for_each(|s| *s /= n as f64);
    Some(sum)
}

/// Cosine similarity, `None` if either vector is zero.
pub fn cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    Some((dot / (na * nb)).clamp(-1.0, 1.0))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SkipReason {
    MissingLabel(NodeId),
    OutOfVocabulary(NodeId),
    ZeroDifference,
    NoExternalScore,
}

impl SkipReason {
    pub fn kind(&self) -> &'static str {
        match self {
            SkipReason::MissingLabel(_) => "missing-label",
            SkipReason::OutOfVocabulary(_) => "out-of-vocabulary",
            SkipReason::ZeroDifference => "zero-difference",
            SkipReason::NoExternalScore => "no-external-score",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Scored(f64),
    Skipped(SkipReason),
}

impl Outcome {
    pub fn score(&self) -> Option<f64> {
        match self {
            Outcome::Scored(s) => Some(*s),
            Outcome::Skipped(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoredQuad {
    pub quad: AnalogyQuad,
    pub outcome: Outcome,
}

fn node_vector(
    store: &OntologyStore,
    node: NodeId,
    table: &EmbeddingTable,
) -> std::result::Result<Vec<f64>, SkipReason> {
    let label = store.label(node).ok_or(SkipReason::MissingLabel(node))?;
    phrase_vector(label, table).ok_or(SkipReason::OutOfVocabulary(node))
}

fn difference(
    store: &OntologyStore,
    pair: Pair,
    table: &EmbeddingTable,
) -> std::result::Result<Vec<f64>, SkipReason> {
    let c = node_vector(store, pair.child, table)?;
    let p = node_vector(store, pair.parent, table)?;
    Ok(c.iter().zip(&p).map(|(x, y)| x - y).collect())
}

pub fn pair_similarity(
    store: &OntologyStore,
    quad: &AnalogyQuad,
    table: &EmbeddingTable,
) -> ScoredQuad {
    let outcome = difference(store, quad.pair1, table)
        .and_then(|d1| Ok((d1, difference(store, quad.pair2, table)?)))
        .and_then(|(d1, d2)| cosine(&d1, &d2).ok_or(SkipReason::ZeroDifference));
    ScoredQuad {
        quad: *quad,
        outcome: match outcome {
            Ok(s) => Outcome::Scored(s),
            Err(r) => Outcome::Skipped(r),
        },
    }
}

pub fn score_quads(
    store: &OntologyStore,
    quads: &[AnalogyQuad],
    table: &EmbeddingTable,
) -> Vec<ScoredQuad> {
    quads
        .par_iter()
        .map(|q| pair_similarity(store, q, table))
        .collect()
}

/// Attach externally computed scores (`quad_index<TAB>score`, 0-based).
/// Quads without a row are skipped.
pub fn apply_external_scores<R: BufRead>(
    quads: &[AnalogyQuad],
    reader: R,
) -> Result<Vec<ScoredQuad>> {
    let mut scores: Vec<Option<f64>> = vec![None; quads.len()];
    for (line, row) in tsv::read_rows(reader, SCORES_HEADER)? {
        let err = |message: String| Error::Parse { line, message };
        let (idx, score) = row
            .split_once('\t')
            .ok_or_else(|| err("expected 2 columns".into()))?;
        let idx: usize = idx
            .parse()
            .map_err(|_| err(format!("bad quad index `{idx}`")))?;
        let score: f64 = score
            .parse()
            .map_err(|_| err(format!("bad score `{score}`")))?;
        if !(-1.0..=1.0).contains(&score) {
            return Err(err(format!("score {score} outside [-1, 1]")));
        }
        let slot = scores
            .get_mut(idx)
            .ok_or_else(|| err(format!("quad index {idx} out of range")))?;
        if slot.replace(score).is_some() {
            return Err(err(format!("duplicate score for quad {idx}")));
        }
    }
    Ok(quads
        .iter()
        .zip(scores)
        .map(|(q, s)| ScoredQuad {
            quad: *q,
            outcome: s.map_or(
                Outcome::Skipped(SkipReason::NoExternalScore),
                Outcome::Scored,
            ),
        })
        .collect())
}

pub const SCORES_HEADER: &str = "quad_index\tscore";
pub const SENTENCES_HEADER: &str = "quad_index\tsentence1\tsentence2";

/// `"{label} is {description}"`, or just the label without a description.
pub fn describe(store: &OntologyStore, node: NodeId) -> String {
    let label = store.display(node);
    match store.description(node) {
        Some(d) => format!("{label} is {d}"),
        None => label.to_string(),
    }
}

/// One row per quad with the template sentences for the two children, for
/// scoring with an external sentence encoder.
pub fn write_sentences<W: Write>(
    store: &OntologyStore,
    quads: &[AnalogyQuad],
    mut out: W,
) -> Result<()> {
    writeln!(out, "{SENTENCES_HEADER}")?;
    for (i, q) in quads.iter().enumerate() {
        let clean = |s: String| s.replace(['\t', '\n', '\r'], " ");
        writeln!(
            out,
            "{i}\t{}\t{}",
            clean(describe(store, q.pair1.child)),
            clean(describe(store, q.pair2.child))
        )?;
    }
    Ok(())
}

/// A scored example reduced to what threshold selection needs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub score: f64,
    pub positive: bool,
}

pub fn samples(scored: &[ScoredQuad]) -> Vec<Sample> {
    scored
        .iter()
        .filter_map(|s| {
            s.outcome.score().map(|score| Sample {
                score,
                positive: s.quad.positive,
            })
        })
        .collect()
}

/// Predictions for scored quads; skipped quads yield `None`.
pub fn classify(scored: &[ScoredQuad], t: f64) -> Vec<Option<bool>> {
    scored
        .iter()
        .map(|s| s.outcome.score().map(|x| x > t))
        .collect()
}

pub fn accuracy(samples: &[Sample], t: f64) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let correct = samples
        .iter()
        .filter(|s| (s.score > t) == s.positive)
        .count();
    correct as f64 / samples.len() as f64
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl Confusion {
    pub fn at(samples: &[Sample], t: f64) -> Self {
        let mut c = Confusion {
            tp: 0,
            fp: 0,
            tn: 0,
            fn_: 0,
        };
        for s in samples {
            match (s.score > t, s.positive) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fn_ += 1,
            }
        }
        c
    }

    pub fn precision(&self) -> Option<f64> {
        let d = self.tp + self.fp;
        (d > 0).then(|| self.tp as f64 / d as f64)
    }

    pub fn recall(&self) -> Option<f64> {
        let d = self.tp + self.fn_;
        (d > 0).then(|| self.tp as f64 / d as f64)
    }
}

/// Thresholds `-1, -1 + step, ...` up to 1, each computed as an integer
/// multiple of the step so no error accumulates.
pub fn threshold_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "grid step must be > 0, got {step}"
        )));
    }
    let n = (2.0 / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| -1.0 + k as f64 * step).collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridResult {
    pub threshold: f64,
    pub accuracy: f64,
}

/// Best threshold on the grid. Several grid points usually tie; the
/// answer is the middle of the first run of consecutive optimal points
/// (the lower middle for even-length runs), which stays inside the gap
/// between separated classes instead of sitting on one edge of it.
pub fn grid_search(samples: &[Sample], step: f64) -> Result<GridResult> {
    let grid = threshold_grid(step)?;
    if samples.is_empty() {
        return Err(Error::NoScorableQuads);
    }
    let mut sorted: Vec<Sample> = samples.to_vec();
    sorted.sort_by(|a, b| a.score.total_cmp(&b.score));
    let total_pos = sorted.iter().filter(|s| s.positive).count();

    // Sweep the grid upward; everything at or below t is predicted negative.
    let mut correct = Vec::with_capacity(grid.len());
    let (mut i, mut neg_below, mut pos_below) = (0, 0, 0);
    for &t in &grid {
        while i < sorted.len() && sorted[i].score <= t {
            if sorted[i].positive {
                pos_below += 1;
            } else {
                neg_below += 1;
            }
            i += 1;
        }
        correct.push(neg_below + total_pos - pos_below);
    }
    let best = *correct.iter().max().expect("grid is never empty");
    let start = correct.iter().position(|&c| c == best).expect("max exists");
    let len = correct[start..].iter().take_while(|&&c| c == best).count();
    let k = start + (len - 1) / 2;
    Ok(GridResult {
        threshold: grid[k],
        accuracy: best as f64 / samples.len() as f64,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CvResult {
    pub mean_accuracy: f64,
    pub folds: Vec<FoldResult>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FoldResult {
    pub threshold: f64,
    pub accuracy: f64,
    pub size: usize,
}

/// Stratified k-fold threshold selection: the threshold is grid-searched on
/// the training folds and scored on the held-out fold.
pub fn cross_validated_accuracy(
    samples: &[Sample],
    k: usize,
    seed: u64,
    step: f64,
) -> Result<CvResult> {
    if k < 2 {
        return Err(Error::CrossValidation(format!(
            "need at least 2 folds, got {k}"
        )));
    }
    if samples.len() < k {
        return Err(Error::CrossValidation(format!(
            "{} scorable quads cannot fill {k} folds; use a smaller k",
            samples.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<usize> = (0..samples.len())
        .filter(|&i| samples[i].positive)
        .collect();
    let mut neg: Vec<usize> = (0..samples.len())
        .filter(|&i| !samples[i].positive)
        .collect();
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);
    let mut fold_of = vec![0usize; samples.len()];
    for (j, &i) in pos.iter().chain(&neg).enumerate() {
        fold_of[i] = j % k;
    }

    let mut folds = Vec::with_capacity(k);
    for f in 0..k {
        let (mut test, mut train) = (Vec::new(), Vec::new());
        for (s, &g) in samples.iter().zip(&fold_of) {
            if g == f {
                test.push(*s)
            } else {
                train.push(*s)
            }
        }
        if test.is_empty() {
            return Err(Error::CrossValidation(format!(
                "fold {f} is empty; use a smaller k"
            )));
        }
        let has_pos = train.iter().any(|s| s.positive);
        let has_neg = train.iter().any(|s| !s.positive);
        if !(has_pos && has_neg) {
            return Err(Error::CrossValidation(format!(
                "training split for fold {f} lacks {} examples; use a smaller k",
                if has_pos { "negative" } else { "positive" }
            )));
        }
        let best = grid_search(&train, step)?;
        folds.push(FoldResult {
            threshold: best.threshold,
            accuracy: accuracy(&test, best.threshold),
            size: test.len(),
        });
    }
    let mean_accuracy = folds.iter().map(|f| f.accuracy).sum::<f64>() / k as f64;
    Ok(CvResult {
        mean_accuracy,
        folds,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKey {
    Label,
    PosType,
}

fn group_name(q: &AnalogyQuad, key: GroupKey) -> &'static str {
    match key {
        GroupKey::Label if q.positive => "positive",
        GroupKey::Label => "negative",
        GroupKey::PosType if q.positive => q.pos_type.as_str(),
        GroupKey::PosType => "negative",
    }
}

/// Counts in half-open bins `[k*w, (k+1)*w)` covering [-1, 1], per group.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub width: f64,
    pub first_bin: i64,
    pub last_bin: i64,
    pub groups: BTreeMap<&'static str, BTreeMap<i64, usize>>,
}

impl Histogram {
    pub fn bin_of(width: f64, score: f64) -> i64 {
        (score / width + 1e-9).floor() as i64
    }

    pub fn count(&self, group: &str, lo: f64) -> usize {
        let bin = Self::bin_of(self.width, lo);
        self.groups
            .get(group)
            .and_then(|g| g.get(&bin))
            .copied()
            .unwrap_or(0)
    }

    pub fn total(&self, group: &str) -> usize {
        self.groups.get(group).map_or(0, |g| g.values().sum())
    }

    /// Lower edge of the fullest bin of a group.
    pub fn mode(&self, group: &str) -> Option<f64> {
        let g = self.groups.get(group)?;
        let (bin, _) = g.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))?;
        Some(*bin as f64 * self.width)
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "group\tbin_start\tbin_end\tcount")?;
        for (group, bins) in &self.groups {
            for k in self.first_bin..=self.last_bin {
                writeln!(
                    out,
                    "{group}\t{}\t{}\t{}",
                    tsv::real(k as f64 * self.width),
                    tsv::real((k + 1) as f64 * self.width),
                    bins.get(&k).copied().unwrap_or(0)
                )?;
            }
        }
        Ok(())
    }
}

pub fn score_histogram(scored: &[ScoredQuad], width: f64, key: GroupKey) -> Result<Histogram> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "bin width must be > 0, got {width}"
        )));
    }
    let mut groups: BTreeMap<&'static str, BTreeMap<i64, usize>> = BTreeMap::new();
    for s in scored {
        if let Some(score) = s.outcome.score() {
            *groups
                .entry(group_name(&s.quad, key))
                .or_default()
                .entry(Histogram::bin_of(width, score))
                .or_default() += 1;
        }
    }
    Ok(Histogram {
        width,
        first_bin: Histogram::bin_of(width, -1.0),
        last_bin: Histogram::bin_of(width, 1.0),
        groups,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalConfig {
    pub grid_step: f64,
    pub cv_folds: usize,
    pub seed: u64,
    pub hist_width: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            grid_step: DEFAULT_GRID_STEP,
            cv_folds: DEFAULT_CV_FOLDS,
            seed: 0,
            hist_width: DEFAULT_HIST_WIDTH,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub total: usize,
    pub scored: usize,
    pub skipped: BTreeMap<&'static str, usize>,
    pub best: GridResult,
    pub confusion: Confusion,
    pub majority_baseline: f64,
    /// `None` when the data cannot support the requested folds.
    pub cv: std::result::Result<CvResult, String>,
    pub mean_score: BTreeMap<&'static str, f64>,
    pub histogram: Histogram,
}

/// Full evaluation over already scored quads.
pub fn evaluate(scored: &[ScoredQuad], config: &EvalConfig) -> Result<EvalReport> {
    let data = samples(scored);
    if data.is_empty() {
        return Err(Error::NoScorableQuads);
    }
    let best = grid_search(&data, config.grid_step)?;
    let cv = cross_validated_accuracy(&data, config.cv_folds, config.seed, config.grid_step)
        .map_err(|e| e.to_string());
    let mut skipped = BTreeMap::new();
    for s in scored {
        if let Outcome::Skipped(r) = &s.outcome {
            *skipped.entry(r.kind()).or_insert(0) += 1;
        }
    }
    let pos = data.iter().filter(|s| s.positive).count();
    let majority_baseline = pos.max(data.len() - pos) as f64 / data.len() as f64;

    let mut sums: BTreeMap<&'static str, (f64, usize)> = BTreeMap::new();
    for s in scored {
        if let Some(x) = s.outcome.score() {
            let e = sums
                .entry(group_name(&s.quad, GroupKey::PosType))
                .or_default();
            e.0 += x;
            e.1 += 1;
        }
    }
    Ok(EvalReport {
        total: scored.len(),
        scored: data.len(),
        skipped,
        best,
        confusion: Confusion::at(&data, best.threshold),
        majority_baseline,
        cv,
        mean_score: sums
            .into_iter()
            .map(|(k, (s, n))| (k, s / n as f64))
            .collect(),
        histogram: score_histogram(scored, config.hist_width, GroupKey::PosType)?,
    })
}

impl EvalReport {
    /// `metric<TAB>value` summary.
    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "metric\tvalue")?;
        writeln!(out, "quads\t{}", self.total)?;
        writeln!(out, "scored\t{}", self.scored)?;
        for (reason, n) in &self.skipped {
            writeln!(out, "skipped.{reason}\t{n}")?;
        }
        writeln!(out, "threshold\t{}", tsv::real(self.best.threshold))?;
        writeln!(out, "accuracy\t{}", tsv::real(self.best.accuracy))?;
        writeln!(
            out,
            "majority_baseline\t{}",
            tsv::real(self.majority_baseline)
        )?;
        writeln!(
            out,
            "precision\t{}",
            tsv::optional_real(self.confusion.precision())
        )?;
        writeln!(
            out,
            "recall\t{}",
            tsv::optional_real(self.confusion.recall())
        )?;
        match &self.cv {
            Ok(cv) => {
                writeln!(out, "cv_folds\t{}", cv.folds.len())?;
                writeln!(out, "cv_accuracy\t{}", tsv::real(cv.mean_accuracy))?;
            }
            Err(e) => writeln!(out, "cv_error\t{e}")?,
        }
        for (group, m) in &self.mean_score {
            writeln!(out, "mean_score.{group}\t{}", tsv::real(*m))?;
        }
        Ok(())
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} of {} quads scored; accuracy {:.3} at t = {:.2} (majority {:.3})",
            self.scored,
            self.total,
            self.best.accuracy,
            self.best.threshold,
            self.majority_baseline
        )?;
        if let Ok(cv) = &self.cv {
            write!(
                f,
                "; {}-fold CV accuracy {:.3}",
                cv.folds.len(),
                cv.mean_accuracy
            )?;
        }
        Ok(())
    }
}

/// Per-quad scores: `quad_index label pos_type score skip_reason`.
pub fn write_scores<W: Write>(scored: &[ScoredQuad], mut out: W) -> Result<()> {
    writeln!(out, "quad_index\tlabel\tpos_type\tscore\tskip_reason")?;
    for (i, s) in scored.iter().enumerate() {
        let (score, reason) = match &s.outcome {
            Outcome::Scored(x) => (tsv::real(*x), ""),
            Outcome::Skipped(r) => (String::new(), r.kind()),
        };
        writeln!(
            out,
            "{i}\t{}\t{}\t{score}\t{reason}",
            u8::from(s.quad.positive),
            s.quad.pos_type
        )?;
    }
    Ok(())
}
