// Score a sampled dataset with word vectors and choose the threshold.
// The vectors are synthetic: each seed sits one category direction away
// from its parent, so same-category quads score near 1.

use analogion::benchmark::{self, QuadCounts, Relatedness};
use analogion::eval::{self, EmbeddingTable, EvalConfig, EvalReport};
use analogion::parse_edge_file;
use analogion::probe::Annotations;
use analogion::synth::BenchmarkOntology;

pub fn run_example() -> analogion::Result<EvalReport> {
    let onto = BenchmarkOntology::new();
    let store = parse_edge_file(onto.edge_file().as_bytes())?;
    let annotations = Annotations::parse(onto.annotation_file().as_bytes())?;
    let seeds = benchmark::resolve_seeds(&store, &annotations, None)?;
    let relatedness = Relatedness::new(&store, 3, benchmark::DEFAULT_STOPLIST);
    let quads = benchmark::build_quads(&store, &seeds, QuadCounts::default(), 7, &relatedness)?;

    let table = EmbeddingTable::load(onto.embedding_file(50, 0.2, 0.01, 1).as_bytes())?;
    let scored = eval::score_quads(&store, &quads, &table);
    let report = eval::evaluate(
        &scored,
        &EvalConfig {
            seed: 7,
            ..EvalConfig::default()
        },
    )?;
    println!("{report}");
    for (group, mean) in &report.mean_score {
        println!("  mean score {group:<8} {mean:.3}");
    }
    Ok(report)
}

#[allow(dead_code)]
fn main() -> analogion::Result<()> {
    run_example().map(|_| ())
}
