//! Command-line front end.
//!
//! Every subcommand reads its inputs, writes TSV artifacts into the output
//! directory and records them in `<command>.manifest.tsv` together with the
//! effective configuration and SHA-256 digests of inputs and outputs.
//!
//! Settings come from built-in defaults, then an optional `--config` file of
//! `key = value` lines, then command-line flags.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{BufReader, Write};
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use crate::benchmark::{self, QuadCounts, Relatedness};
use crate::error::{Error, Result};
use crate::eval::{self, EmbeddingTable, EvalConfig};
use crate::metrics::{self, Metrics, MetricsConfig};
use crate::miner::{self, FilterConfig, MiningConfig, SharedValuePolicy};
use crate::probe::{self, Annotations, SuperstringOptions};
use crate::store::{CyclePolicy, InstanceMode, OntologyStore, StoreOptions};

pub const THREADS_ENV: &str = "ANALOGION_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "analogion",
    version,
    about = "Ontology quality metrics and analogy benchmarks from Wikidata-style edge files"
)]
pub struct Cli {
    /// Config file with `key = value` lines; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Edge file (`id node1 label node2`).
    #[arg(long, global = true, value_name = "FILE")]
    pub edges: Option<PathBuf>,
    /// Output directory [default: out].
    #[arg(long, short = 'o', global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Instance sets: `transitive` or `direct` [default: transitive].
    #[arg(long, global = true)]
    pub mode: Option<InstanceMode>,
    /// Subclass cycles: `error` or `break` [default: error].
    #[arg(long, global = true)]
    pub cycle_policy: Option<CyclePolicy>,
    /// Random seed, required by `benchmark` and `eval`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse an edge file and report counts, cycles and skipped lines.
    Ingest,
    /// Inspect subclass pairs: qualifiers, other statements, siblings.
    Probe(ProbeArgs),
    /// Per-edge IC/RR/CO/H table.
    Metrics(MetricsArgs),
    /// Class pairs passing the metric thresholds.
    Filter(FilterArgs),
    /// Filtered class pairs plus instance analogies mined from them.
    Candidates(CandidatesArgs),
    /// Sample a labelled analogy dataset from annotated seed pairs.
    Benchmark(BenchmarkArgs),
    /// Score a dataset with word vectors or external scores.
    Eval(EvalArgs),
}

#[derive(Args, Debug, Default)]
pub struct ProbeArgs {
    /// Annotation file (`subject object category`).
    #[arg(long, value_name = "FILE")]
    pub annotations: Option<PathBuf>,
    /// Probe only these pairs, given as `CHILD:PARENT`.
    #[arg(long = "pair", value_name = "CHILD:PARENT")]
    pub pairs: Vec<String>,
    /// Keep the first N label-superstring pairs (by subject id).
    #[arg(long, value_name = "N")]
    pub first: Option<usize>,
    /// Require the parent label to occur as whole words.
    #[arg(long)]
    pub whole_word: bool,
}

#[derive(Args, Debug, Default)]
pub struct MetricsArgs {
    /// Rescale child probabilities to sum to 1 before computing entropy.
    #[arg(long)]
    pub normalize_entropy: bool,
}

#[derive(Args, Debug, Default)]
pub struct FilterArgs {
    /// Child instance count must exceed this [default: 1000].
    #[arg(long)]
    pub ic_min: Option<u64>,
    /// Reduction ratio must be below this [default: 0.85].
    #[arg(long)]
    pub rr_max: Option<f64>,
    /// Class overlap must be below this [default: 0.5].
    #[arg(long)]
    pub co_max: Option<f64>,
    /// Parent entropy must exceed this [default: 1.0].
    #[arg(long)]
    pub h_min: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct CandidatesArgs {
    #[command(flatten)]
    pub filter: FilterArgs,
    /// `any-property` or `same-property` [default: any-property].
    #[arg(long)]
    pub policy: Option<SharedValuePolicy>,
    /// Instance analogies kept per candidate [default: 100].
    #[arg(long)]
    pub limit: Option<usize>,
    /// Cap on the merged list of instance analogies.
    #[arg(long)]
    pub total_cap: Option<usize>,
}

#[derive(Args, Debug, Default)]
pub struct BenchmarkArgs {
    /// Annotation file (`subject object category`).
    #[arg(long, value_name = "FILE")]
    pub annotations: Option<PathBuf>,
    /// Seed pairs (`child parent`); defaults to every annotated pair.
    #[arg(long, value_name = "FILE")]
    pub seeds: Option<PathBuf>,
    /// Positives whose children share a direct parent [default: 25].
    #[arg(long)]
    pub n_direct: Option<usize>,
    /// Positives whose parents share a direct parent [default: 50].
    #[arg(long)]
    pub n_parent: Option<usize>,
    /// Positives related through a more distant ancestor [default: 25].
    #[arg(long)]
    pub n_distant: Option<usize>,
    /// Negatives from different categories [default: 100].
    #[arg(long)]
    pub n_neg: Option<usize>,
    /// Ancestor search depth for distant positives [default: 3].
    #[arg(long)]
    pub max_distance: Option<usize>,
    /// Comma-separated classes never counted as shared ancestors [default: Q35120].
    #[arg(long)]
    pub stoplist: Option<String>,
    /// Re-check an edited dataset file instead of sampling a new one.
    #[arg(long, value_name = "FILE")]
    pub validate: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct EvalArgs {
    /// Dataset written by `benchmark`.
    #[arg(long, value_name = "FILE")]
    pub dataset: Option<PathBuf>,
    /// Word vectors (`count dim` header, then `token c1 .. cdim`).
    #[arg(long, value_name = "FILE")]
    pub embeddings: Option<PathBuf>,
    /// Precomputed scores (`quad_index score`).
    #[arg(long, value_name = "FILE")]
    pub scores: Option<PathBuf>,
    /// Threshold grid spacing [default: 0.05].
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Folds for cross-validated threshold selection [default: 5].
    #[arg(long)]
    pub cv_folds: Option<usize>,
    /// Score histogram bin width [default: 0.1].
    #[arg(long)]
    pub hist_width: Option<f64>,
    /// Also write `sentences.tsv` for an external sentence encoder.
    #[arg(long)]
    pub export_sentences: bool,
}

/// Effective settings for one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub edges: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub seeds: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub scores: Option<PathBuf>,
    pub dataset: Option<PathBuf>,
    pub out: PathBuf,
    pub mode: InstanceMode,
    pub cycle_policy: CyclePolicy,
    pub normalize_entropy: bool,
    pub filter: FilterConfig,
    pub policy: SharedValuePolicy,
    pub limit: usize,
    pub total_cap: Option<usize>,
    pub counts: QuadCounts,
    pub max_distance: usize,
    pub stoplist: Vec<String>,
    pub seed: Option<u64>,
    pub grid_step: f64,
    pub cv_folds: usize,
    pub hist_width: f64,
    pub whole_word: bool,
    pub first: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            edges: None,
            annotations: None,
            seeds: None,
            embeddings: None,
            scores: None,
            dataset: None,
            out: PathBuf::from("out"),
            mode: InstanceMode::Transitive,
            cycle_policy: CyclePolicy::Error,
            normalize_entropy: false,
            filter: FilterConfig::default(),
            policy: SharedValuePolicy::AnyProperty,
            limit: 100,
            total_cap: None,
            counts: QuadCounts::default(),
            max_distance: 3,
            stoplist: benchmark::DEFAULT_STOPLIST
                .iter()
                .map(|s| s.to_string())
                .collect(),
            seed: None,
            grid_step: eval::DEFAULT_GRID_STEP,
            cv_folds: eval::DEFAULT_CV_FOLDS,
            hist_width: eval::DEFAULT_HIST_WIDTH,
            whole_word: false,
            first: None,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("invalid value `{value}` for `{key}`")))
}

impl RunConfig {
    /// Parse `key = value` lines. Blank lines and `#` comments are ignored;
    /// keys accept `-` or `_`.
    pub fn from_config_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected `key = value`, found `{line}`"),
            })?;
            cfg.set(&key.trim().replace('-', "_"), value.trim())
                .map_err(|e| Error::Parse {
                    line: i + 1,
                    message: e.to_string(),
                })?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let path = || Some(PathBuf::from(value));
        match key {
            "edges" => self.edges = path(),
            "annotations" => self.annotations = path(),
            "seeds" => self.seeds = path(),
            "embeddings" => self.embeddings = path(),
            "scores" => self.scores = path(),
            "dataset" => self.dataset = path(),
            "out" => self.out = PathBuf::from(value),
            "mode" => self.mode = parse_value(key, value)?,
            "cycle_policy" => self.cycle_policy = parse_value(key, value)?,
            "normalize_entropy" => self.normalize_entropy = parse_value(key, value)?,
            "ic_min" => self.filter.ic_min = parse_value(key, value)?,
            "rr_max" => self.filter.rr_max = parse_value(key, value)?,
            "co_max" => self.filter.co_max = parse_value(key, value)?,
            "h_min" => self.filter.h_min = parse_value(key, value)?,
            "policy" => self.policy = parse_value(key, value)?,
            "limit" => self.limit = parse_value(key, value)?,
            "total_cap" => self.total_cap = Some(parse_value(key, value)?),
            "n_direct" => self.counts.direct = parse_value(key, value)?,
            "n_parent" => self.counts.parent = parse_value(key, value)?,
            "n_distant" => self.counts.distant = parse_value(key, value)?,
            "n_neg" => self.counts.negative = parse_value(key, value)?,
            "max_distance" => self.max_distance = parse_value(key, value)?,
            "stoplist" => self.stoplist = split_list(value),
            "seed" => self.seed = Some(parse_value(key, value)?),
            "grid_step" => self.grid_step = parse_value(key, value)?,
            "cv_folds" => self.cv_folds = parse_value(key, value)?,
            "hist_width" => self.hist_width = parse_value(key, value)?,
            "whole_word" => self.whole_word = parse_value(key, value)?,
            "first" => self.first = Some(parse_value(key, value)?),
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown config key `{other}`"
                )))
            }
        }
        Ok(())
    }

    /// Settings as `(key, value)` rows for the manifest.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let path = |p: &Option<PathBuf>| {
            p.as_ref()
                .map_or(String::new(), |p| p.display().to_string())
        };
        let opt = |v: Option<usize>| v.map_or(String::new(), |v| v.to_string());
        vec![
            ("edges", path(&self.edges)),
            ("annotations", path(&self.annotations)),
            ("seeds", path(&self.seeds)),
            ("embeddings", path(&self.embeddings)),
            ("scores", path(&self.scores)),
            ("dataset", path(&self.dataset)),
            ("out", self.out.display().to_string()),
            ("mode", self.mode.to_string()),
            ("cycle_policy", self.cycle_policy.to_string()),
            ("normalize_entropy", self.normalize_entropy.to_string()),
            ("ic_min", self.filter.ic_min.to_string()),
            ("rr_max", self.filter.rr_max.to_string()),
            ("co_max", self.filter.co_max.to_string()),
            ("h_min", self.filter.h_min.to_string()),
            ("policy", self.policy.to_string()),
            ("limit", self.limit.to_string()),
            ("total_cap", opt(self.total_cap)),
            ("n_direct", self.counts.direct.to_string()),
            ("n_parent", self.counts.parent.to_string()),
            ("n_distant", self.counts.distant.to_string()),
            ("n_neg", self.counts.negative.to_string()),
            ("max_distance", self.max_distance.to_string()),
            ("stoplist", self.stoplist.join(",")),
            ("seed", self.seed.map_or(String::new(), |s| s.to_string())),
            ("grid_step", self.grid_step.to_string()),
            ("cv_folds", self.cv_folds.to_string()),
            ("hist_width", self.hist_width.to_string()),
            ("whole_word", self.whole_word.to_string()),
            ("first", opt(self.first)),
        ]
    }

    fn apply_filter(&mut self, f: &FilterArgs) {
        if let Some(v) = f.ic_min {
            self.filter.ic_min = v;
        }
        if let Some(v) = f.rr_max {
            self.filter.rr_max = v;
        }
        if let Some(v) = f.co_max {
            self.filter.co_max = v;
        }
        if let Some(v) = f.h_min {
            self.filter.h_min = v;
        }
    }

    /// Defaults, then the config file, then flags.
    pub fn resolve(cli: &Cli) -> Result<Self> {
        let mut cfg = match &cli.config {
            Some(p) => Self::from_config_text(&read_text(p)?)?,
            None => Self::default(),
        };
        macro_rules! flag {
            ($src:expr => $dst:expr) => {
                if let Some(v) = $src.clone() {
                    $dst = v.into();
                }
            };
        }
        flag!(cli.edges => cfg.edges);
        flag!(cli.out => cfg.out);
        flag!(cli.mode => cfg.mode);
        flag!(cli.cycle_policy => cfg.cycle_policy);
        flag!(cli.seed => cfg.seed);
        match &cli.command {
            Command::Ingest => {}
            Command::Probe(a) => {
                flag!(a.annotations => cfg.annotations);
                flag!(a.first => cfg.first);
                cfg.whole_word |= a.whole_word;
            }
            Command::Metrics(a) => cfg.normalize_entropy |= a.normalize_entropy,
            Command::Filter(a) => cfg.apply_filter(a),
            Command::Candidates(a) => {
                cfg.apply_filter(&a.filter);
                flag!(a.policy => cfg.policy);
                flag!(a.limit => cfg.limit);
                flag!(a.total_cap => cfg.total_cap);
            }
            Command::Benchmark(a) => {
                flag!(a.annotations => cfg.annotations);
                flag!(a.seeds => cfg.seeds);
                flag!(a.n_direct => cfg.counts.direct);
                flag!(a.n_parent => cfg.counts.parent);
                flag!(a.n_distant => cfg.counts.distant);
                flag!(a.n_neg => cfg.counts.negative);
                flag!(a.max_distance => cfg.max_distance);
                if let Some(s) = &a.stoplist {
                    cfg.stoplist = split_list(s);
                }
            }
            Command::Eval(a) => {
                flag!(a.dataset => cfg.dataset);
                flag!(a.embeddings => cfg.embeddings);
                flag!(a.scores => cfg.scores);
                flag!(a.grid_step => cfg.grid_step);
                flag!(a.cv_folds => cfg.cv_folds);
                flag!(a.hist_width => cfg.hist_width);
            }
        }
        cfg.filter.mode = cfg.mode;
        Ok(cfg)
    }
}

fn split_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn open(path: &Path) -> Result<BufReader<fs::File>> {
    fs::File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::InvalidArgument(format!("cannot open {}: {e}", path.display())))
}

fn require<'a>(value: &'a Option<PathBuf>, what: &str) -> Result<&'a PathBuf> {
    value
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument(format!("missing --{what}")))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn file_digest(path: &Path) -> Result<String> {
    let bytes = fs::read(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    Ok(sha256_hex(&bytes))
}

/// Artifacts and messages produced by one subcommand.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub command: &'static str,
    pub inputs: Vec<(&'static str, PathBuf)>,
    pub artifacts: Vec<(String, Vec<u8>)>,
    pub messages: Vec<String>,
    pub warnings: Vec<String>,
}

impl RunOutput {
    fn new(command: &'static str) -> Self {
        Self {
            command,
            ..Self::default()
        }
    }

    fn artifact(
        &mut self,
        name: &str,
        write: impl FnOnce(&mut Vec<u8>) -> Result<()>,
    ) -> Result<()> {
        let mut buf = Vec::new();
        write(&mut buf)?;
        self.artifacts.push((name.to_string(), buf));
        Ok(())
    }

    /// Write artifacts and the manifest into `dir`; returns the manifest path.
    pub fn persist(&self, config: &RunConfig, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let mut manifest = String::from("kind\tkey\tvalue\tsha256\n");
        manifest.push_str(&format!("command\tname\t{}\t\n", self.command));
        for (role, path) in &self.inputs {
            manifest.push_str(&format!(
                "input\t{role}\t{}\t{}\n",
                path.display(),
                file_digest(path)?
            ));
        }
        for (k, v) in config.entries() {
            manifest.push_str(&format!("config\t{k}\t{v}\t\n"));
        }
        for (name, bytes) in &self.artifacts {
            fs::write(dir.join(name), bytes)?;
            manifest.push_str(&format!(
                "artifact\t{name}\t{}\t{}\n",
                bytes.len(),
                sha256_hex(bytes)
            ));
        }
        let path = dir.join(format!("{}.manifest.tsv", self.command));
        fs::write(&path, manifest)?;
        Ok(path)
    }
}

fn load_store(config: &RunConfig, out: &mut RunOutput) -> Result<OntologyStore> {
    let path = require(&config.edges, "edges")?;
    out.inputs.push(("edges", path.clone()));
    let store = OntologyStore::parse(
        open(path)?,
        StoreOptions {
            cycle_policy: config.cycle_policy,
        },
    )?;
    let report = store.report();
    if !report.malformed_lines.is_empty() {
        out.warnings.push(format!(
            "skipped {} malformed line(s)",
            report.malformed_lines.len()
        ));
    }
    Ok(store)
}

fn load_annotations(config: &RunConfig, out: &mut RunOutput) -> Result<Annotations> {
    let path = require(&config.annotations, "annotations")?;
    out.inputs.push(("annotations", path.clone()));
    Annotations::parse(open(path)?)
}

fn require_seed(config: &RunConfig, command: &str) -> Result<u64> {
    config.seed.ok_or_else(|| {
        Error::InvalidArgument(format!(
            "`{command}` is randomized and needs --seed (or `seed = ...` in the config file)"
        ))
    })
}

fn filter_rows(
    store: &OntologyStore,
    config: &RunConfig,
) -> Result<Vec<miner::ClassPairCandidate>> {
    let rows = Metrics::new(
        store,
        MetricsConfig {
            mode: config.mode,
            normalize_entropy: config.normalize_entropy,
        },
    )
    .table()?;
    miner::filter_classes(&rows, &config.filter)
}

/// Run one subcommand and collect its artifacts without touching disk.
pub fn execute(command: &Command, config: &RunConfig) -> Result<RunOutput> {
    match command {
        Command::Ingest => ingest(config),
        Command::Probe(a) => run_probe(a, config),
        Command::Metrics(_) => run_metrics(config),
        Command::Filter(_) => run_filter(config),
        Command::Candidates(_) => run_candidates(config),
        Command::Benchmark(a) => run_benchmark(a, config),
        Command::Eval(a) => run_eval(a, config),
    }
}

fn ingest(config: &RunConfig) -> Result<RunOutput> {
    let mut out = RunOutput::new("ingest");
    let store = load_store(config, &mut out)?;
    let r = store.report();
    let cycles = store.detect_cycles();
    let summary = [
        ("rows", r.rows),
        ("nodes", store.node_count()),
        ("statements", store.statements().len()),
        ("classes", store.class_count()),
        ("subclass_edges", store.subclass_edges().count()),
        ("labels", store.label_count()),
        ("descriptions", store.description_count()),
        ("malformed_lines", r.malformed_lines.len()),
        ("dangling_qualifiers", r.dangling_qualifier_lines.len()),
        ("cycles", cycles.len()),
        ("broken_edges", store.broken_edges().len()),
    ];
    out.artifact("ingest.tsv", |w| {
        writeln!(w, "metric\tvalue")?;
        for (k, v) in summary {
            writeln!(w, "{k}\t{v}")?;
        }
        Ok(())
    })?;
    out.artifact("issues.tsv", |w| {
        writeln!(w, "kind\tdetail")?;
        for l in &r.malformed_lines {
            writeln!(w, "malformed_line\t{l}")?;
        }
        for l in &r.dangling_qualifier_lines {
            writeln!(w, "dangling_qualifier_line\t{l}")?;
        }
        for c in cycles {
            let ids: Vec<&str> = c.iter().map(|&n| store.external(n)).collect();
            writeln!(w, "cycle\t{}", ids.join(","))?;
        }
        for &(child, parent) in store.broken_edges() {
            writeln!(
                w,
                "broken_edge\t{}>{}",
                store.external(child),
                store.external(parent)
            )?;
        }
        Ok(())
    })?;
    out.messages.push(format!(
        "{} rows, {} statements, {} classes, {} cycle(s)",
        r.rows,
        store.statements().len(),
        store.class_count(),
        cycles.len()
    ));
    if !cycles.is_empty() && config.cycle_policy == CyclePolicy::Error {
        out.warnings.push(
            "subclass cycles found; metric commands will refuse this store unless --cycle-policy break"
                .into(),
        );
    }
    Ok(out)
}

fn run_probe(args: &ProbeArgs, config: &RunConfig) -> Result<RunOutput> {
    let mut out = RunOutput::new("probe");
    let store = load_store(config, &mut out)?;
    let pairs = if args.pairs.is_empty() {
        let found = probe::superstring_pairs(
            &store,
            SuperstringOptions {
                whole_word: config.whole_word,
            },
        );
        let mut pairs = found.pairs;
        if let Some(n) = config.first {
            pairs.truncate(n);
        }
        pairs
    } else {
        args.pairs
            .iter()
            .map(|p| {
                let (c, o) = p.split_once(':').ok_or_else(|| {
                    Error::InvalidArgument(format!("--pair expects CHILD:PARENT, got `{p}`"))
                })?;
                Ok((store.require(c)?, store.require(o)?))
            })
            .collect::<Result<Vec<_>>>()?
    };
    let mut reports = pairs
        .iter()
        .map(|&(s, o)| probe::probe_pair(&store, s, o))
        .collect::<Result<Vec<_>>>()?;
    if config.annotations.is_some() {
        load_annotations(config, &mut out)?.annotate(&store, &mut reports);
    }
    let coverage = probe::qualifier_coverage(&reports);
    out.artifact("probe.tsv", |w| {
        probe::write_probe_reports(&store, &reports, w)
    })?;
    out.artifact("coverage.tsv", |w| {
        probe::write_coverage(&store, &coverage, w)
    })?;
    out.messages.push(format!(
        "{} pair(s) probed, {} with qualifiers",
        coverage.total, coverage.with_qualifier
    ));
    Ok(out)
}

fn run_metrics(config: &RunConfig) -> Result<RunOutput> {
    let mut out = RunOutput::new("metrics");
    let store = load_store(config, &mut out)?;
    let rows = Metrics::new(
        &store,
        MetricsConfig {
            mode: config.mode,
            normalize_entropy: config.normalize_entropy,
        },
    )
    .table()?;
    out.artifact("metrics.tsv", |w| metrics::write_metrics(&store, &rows, w))?;
    out.messages
        .push(format!("{} subclass edge(s) measured", rows.len()));
    Ok(out)
}

fn run_filter(config: &RunConfig) -> Result<RunOutput> {
    let mut out = RunOutput::new("filter");
    let store = load_store(config, &mut out)?;
    let candidates = filter_rows(&store, config)?;
    out.artifact("candidates.tsv", |w| {
        miner::write_candidates(&store, &candidates, w)
    })?;
    out.messages
        .push(format!("{} candidate class pair(s)", candidates.len()));
    Ok(out)
}

fn run_candidates(config: &RunConfig) -> Result<RunOutput> {
    let mut out = RunOutput::new("candidates");
    let store = load_store(config, &mut out)?;
    let candidates = filter_rows(&store, config)?;
    let analogies = miner::mine_candidates(
        &store,
        &candidates,
        &MiningConfig {
            policy: config.policy,
            limit: config.limit,
            total_cap: config.total_cap,
            mode: config.mode,
        },
    )?;
    out.artifact("candidates.tsv", |w| {
        miner::write_candidates(&store, &candidates, w)
    })?;
    out.artifact("analogies.tsv", |w| {
        miner::write_instance_analogies(&store, &analogies, w)
    })?;
    out.messages.push(format!(
        "{} candidate class pair(s), {} instance analogies",
        candidates.len(),
        analogies.len()
    ));
    Ok(out)
}

fn run_benchmark(args: &BenchmarkArgs, config: &RunConfig) -> Result<RunOutput> {
    let mut out = RunOutput::new("benchmark");
    let store = load_store(config, &mut out)?;
    let relatedness = Relatedness::new(&store, config.max_distance, &config.stoplist);

    if let Some(path) = &args.validate {
        out.inputs.push(("dataset", path.clone()));
        let quads = benchmark::read_dataset(&store, open(path)?)?;
        benchmark::validate_quads(&store, &quads, &relatedness)?;
        let pos = quads.iter().filter(|q| q.positive).count();
        out.artifact("validation.tsv", |w| {
            writeln!(w, "metric\tvalue")?;
            writeln!(w, "quads\t{}", quads.len())?;
            writeln!(w, "positives\t{pos}")?;
            writeln!(w, "negatives\t{}", quads.len() - pos)?;
            Ok(())
        })?;
        out.messages.push(format!("{} quad(s) valid", quads.len()));
        return Ok(out);
    }

    let seed = require_seed(config, "benchmark")?;
    let annotations = load_annotations(config, &mut out)?;
    let listed = match &config.seeds {
        Some(p) => {
            out.inputs.push(("seeds", p.clone()));
            Some(benchmark::read_seed_pairs(open(p)?)?)
        }
        None => None,
    };
    let seeds = benchmark::resolve_seeds(&store, &annotations, listed.as_deref())?;
    let quads = benchmark::build_quads(&store, &seeds, config.counts, seed, &relatedness)?;
    let negatives: Vec<_> = quads.iter().filter(|q| !q.positive).copied().collect();
    let distribution = benchmark::category_distribution(&quads);
    out.artifact("dataset.tsv", |w| {
        benchmark::write_dataset(&store, &quads, w)
    })?;
    out.artifact("negatives.tsv", |w| {
        writeln!(w, "quad\tcategory1\tcategory2")?;
        for q in &negatives {
            writeln!(
                w,
                "{} : {} :: {} : {}\t{}\t{}",
                store.display(q.pair1.child),
                store.display(q.pair1.parent),
                store.display(q.pair2.child),
                store.display(q.pair2.parent),
                q.category1,
                q.category2
            )?;
        }
        Ok(())
    })?;
    out.artifact("distribution.tsv", |w| {
        benchmark::write_distribution(&distribution, w)
    })?;
    out.messages.push(format!(
        "{} quads from {} seed pairs ({} positive, {} negative)",
        quads.len(),
        seeds.len(),
        quads.len() - negatives.len(),
        negatives.len()
    ));
    Ok(out)
}

fn run_eval(args: &EvalArgs, config: &RunConfig) -> Result<RunOutput> {
    let mut out = RunOutput::new("eval");
    let seed = require_seed(config, "eval")?;
    let store = load_store(config, &mut out)?;
    let dataset = require(&config.dataset, "dataset")?;
    out.inputs.push(("dataset", dataset.clone()));
    let quads = benchmark::read_dataset(&store, open(dataset)?)?;

    let scored = match (&config.embeddings, &config.scores) {
        (Some(e), None) => {
            out.inputs.push(("embeddings", e.clone()));
            let table = EmbeddingTable::load(open(e)?)?;
            if let Some((declared, actual)) = table.count_mismatch() {
                out.warnings.push(format!(
                    "embedding header declares {declared} vectors, file has {actual}"
                ));
            }
            eval::score_quads(&store, &quads, &table)
        }
        (None, Some(s)) => {
            out.inputs.push(("scores", s.clone()));
            eval::apply_external_scores(&quads, open(s)?)?
        }
        _ => {
            return Err(Error::InvalidArgument(
                "give exactly one of --embeddings or --scores".into(),
            ))
        }
    };
    let report = eval::evaluate(
        &scored,
        &EvalConfig {
            grid_step: config.grid_step,
            cv_folds: config.cv_folds,
            seed,
            hist_width: config.hist_width,
        },
    )?;
    if let Err(e) = &report.cv {
        out.warnings.push(format!("cross-validation skipped: {e}"));
    }
    out.artifact("eval.tsv", |w| report.write(w))?;
    out.artifact("scores.tsv", |w| eval::write_scores(&scored, w))?;
    out.artifact("histogram.tsv", |w| report.histogram.write(w))?;
    if let Ok(cv) = &report.cv {
        out.artifact("cv.tsv", |w| {
            writeln!(w, "fold\tsize\tthreshold\taccuracy")?;
            for (i, f) in cv.folds.iter().enumerate() {
                writeln!(
                    w,
                    "{i}\t{}\t{}\t{}",
                    f.size,
                    crate::tsv::real(f.threshold),
                    crate::tsv::real(f.accuracy)
                )?;
            }
            Ok(())
        })?;
    }
    if args.export_sentences {
        out.artifact("sentences.tsv", |w| {
            eval::write_sentences(&store, &quads, w)
        })?;
    }
    out.messages.push(report.to_string());
    Ok(out)
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        Error::InvalidArgument(format!(
            "{THREADS_ENV} must be a non-negative integer, got `{raw}`"
        ))
    })?;
    // A pool may already exist when called repeatedly in one process.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Parse `args` (program name first), run, and return the exit status:
/// 0 on success, 1 on bad input or usage, 2 on an internal failure.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    1
                }
            };
        }
    };
    let result = panic::catch_unwind(AssertUnwindSafe(|| -> Result<(PathBuf, RunOutput)> {
        configure_threads()?;
        let config = RunConfig::resolve(&cli)?;
        let output = execute(&cli.command, &config)?;
        let manifest = output.persist(&config, &config.out)?;
        Ok((manifest, output))
    }));
    match result {
        Ok(Ok((manifest, output))) => {
            for w in &output.warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            for m in &output.messages {
                let _ = writeln!(stdout, "{m}");
            }
            let _ = writeln!(stdout, "wrote {}", manifest.display());
            0
        }
        Ok(Err(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .map(String::as_str)
                .or_else(|| payload.downcast_ref::<&str>().copied())
                .unwrap_or("unknown panic");
            let _ = writeln!(stderr, "internal error: {msg}");
            2
        }
    }
}

/// Manifest rows as `kind -> [(key, value, sha256)]`.
pub fn read_manifest(text: &str) -> BTreeMap<String, Vec<(String, String, String)>> {
    let mut out: BTreeMap<String, Vec<_>> = BTreeMap::new();
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split('\t').collect();
        if let [kind, key, value, digest] = f[..] {
            out.entry(kind.to_string()).or_default().push((
                key.to_string(),
                value.to_string(),
                digest.to_string(),
            ));
        }
    }
    out
}
