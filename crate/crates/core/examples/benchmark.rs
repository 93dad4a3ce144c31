// Sample 25 direct, 50 parent, 25 distant positives and 100 negatives
// from sixty annotated subclass pairs.

use analogion::benchmark::{self, AnalogyQuad, QuadCounts, Relatedness};
use analogion::parse_edge_file;
use analogion::probe::Annotations;
use analogion::synth::BenchmarkOntology;

pub fn run_example() -> analogion::Result<Vec<AnalogyQuad>> {
    let onto = BenchmarkOntology::new();
    let store = parse_edge_file(onto.edge_file().as_bytes())?;
    let annotations = Annotations::parse(onto.annotation_file().as_bytes())?;

    let seeds = benchmark::resolve_seeds(&store, &annotations, None)?;
    let relatedness = Relatedness::new(&store, 3, benchmark::DEFAULT_STOPLIST);
    let quads = benchmark::build_quads(&store, &seeds, QuadCounts::default(), 7, &relatedness)?;
    benchmark::validate_quads(&store, &quads, &relatedness)?;

    for q in quads.iter().step_by(40) {
        println!(
            "{} : {} :: {} : {}  [{} {}]",
            store.display(q.pair1.child),
            store.display(q.pair1.parent),
            store.display(q.pair2.child),
            store.display(q.pair2.parent),
            if q.positive { "positive" } else { "negative" },
            q.pos_type
        );
    }
    for (category, n) in benchmark::category_distribution(&quads) {
        println!("  {category:<10} {n}");
    }
    Ok(quads)
}

#[allow(dead_code)]
fn main() -> analogion::Result<()> {
    run_example().map(|_| ())
}
