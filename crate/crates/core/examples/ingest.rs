// Load an edge file and look around the class hierarchy.

use std::fs::File;
use std::io::BufReader;

use analogion::{parse_edge_file, InstanceMode, OntologyStore};

pub fn run_example() -> analogion::Result<OntologyStore> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/fix_b.tsv");
    let store = parse_edge_file(BufReader::new(File::open(path)?))?;

    let report = store.report();
    println!(
        "{} rows, {} statements, {} classes, {} malformed",
        report.rows,
        store.statements().len(),
        store.class_count(),
        report.malformed_lines.len()
    );

    let artwork = store.require("Q4502142")?;
    for &child in store.subclasses_of(artwork) {
        let direct = store.instances_of(child, InstanceMode::Direct)?.len();
        let all = store.instances_of(child, InstanceMode::Transitive)?.len();
        println!(
            "  {:<20} {direct:>5} direct, {all:>5} transitive",
            store.display(child)
        );
    }
    println!(
        "visual artwork: {} instances",
        store.instances_of(artwork, InstanceMode::Transitive)?.len()
    );
    Ok(store)
}

#[allow(dead_code)]
fn main() -> analogion::Result<()> {
    run_example().map(|_| ())
}
