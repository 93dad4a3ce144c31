// Filter class pairs by their metrics, then mine instance pairs that
// point at the same thing: a painting depicting Paris and a film set in
// Paris, two buildings by the same architect.

use std::fs::File;
use std::io::BufReader;

use analogion::metrics::{Metrics, MetricsConfig};
use analogion::miner::{self, FilterConfig, InstanceAnalogy, MiningConfig};
use analogion::parse_edge_file;

pub fn run_example() -> analogion::Result<Vec<InstanceAnalogy>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/fix_b.tsv");
    let store = parse_edge_file(BufReader::new(File::open(path)?))?;

    let rows = Metrics::new(&store, MetricsConfig::default()).table()?;
    let candidates = miner::filter_classes(&rows, &FilterConfig::default())?;
    println!("{} candidate class pairs, e.g.", candidates.len());
    for c in candidates.iter().take(4) {
        println!(
            "  {:<12} {} / {}",
            c.kind.as_str(),
            store.display(c.class_a),
            store.display(c.class_b)
        );
    }

    let analogies = miner::mine_candidates(&store, &candidates, &MiningConfig::default())?;
    for x in &analogies {
        println!(
            "{} :: {} via {} ({} / {})",
            store.display(x.a),
            store.display(x.b),
            store.display(x.value),
            store.display(x.property_a),
            store.display(x.property_b)
        );
    }
    Ok(analogies)
}

#[allow(dead_code)]
fn main() -> analogion::Result<()> {
    run_example().map(|_| ())
}
