// How consistently are compound subclass pairs annotated? Finds pairs
// whose child label extends the parent label, then reports qualifiers.

use std::fs::File;
use std::io::BufReader;

use analogion::parse_edge_file;
use analogion::probe::{self, Annotations, QualifierCoverage, SuperstringOptions};
use analogion::store::Value;

pub fn run_example() -> analogion::Result<QualifierCoverage> {
    let dir = env!("CARGO_MANIFEST_DIR");
    let store = parse_edge_file(BufReader::new(File::open(format!(
        "{dir}/fixtures/table1.tsv"
    ))?))?;
    let annotations = Annotations::parse(BufReader::new(File::open(format!(
        "{dir}/fixtures/table1_annotations.tsv"
    ))?))?;

    let mut pairs = probe::superstring_pairs(&store, SuperstringOptions::default()).pairs;
    pairs.truncate(20);
    let mut reports = pairs
        .iter()
        .map(|&(s, o)| probe::probe_pair(&store, s, o))
        .collect::<analogion::Result<Vec<_>>>()?;
    annotations.annotate(&store, &mut reports);

    let coverage = probe::qualifier_coverage(&reports);
    println!(
        "{} of {} pairs carry a qualifier",
        coverage.with_qualifier, coverage.total
    );
    for (property, n) in &coverage.histogram {
        println!("  {:<10} {n}", store.display(*property));
    }

    let keyboard = probe::probe_pair(&store, store.require("Q250")?, store.require("Q1921606")?)?;
    for q in &keyboard.qualifiers {
        let value = match &q.value {
            Value::Node(n) => store.display(*n).to_string(),
            Value::Literal(s) => s.clone(),
        };
        println!(
            "computer keyboard qualifier: {} = {value}",
            store.display(q.property)
        );
    }
    Ok(coverage)
}

#[allow(dead_code)]
fn main() -> analogion::Result<()> {
    run_example().map(|_| ())
}
