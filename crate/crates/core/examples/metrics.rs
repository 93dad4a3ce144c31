// Instance count, reduction ratio, class overlap and subclass entropy on
// a tiny building hierarchy.

use std::fs::File;
use std::io::BufReader;

use analogion::metrics::{self, ClassMetrics, Metrics, MetricsConfig};
use analogion::parse_edge_file;

pub fn run_example() -> analogion::Result<Vec<ClassMetrics>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/fix_a.tsv");
    let store = parse_edge_file(BufReader::new(File::open(path)?))?;
    let m = Metrics::new(&store, MetricsConfig::default());

    let building = store.require("Q41176")?;
    let house = store.require("Q3947")?;
    println!("IC(house)          = {}", m.instance_count(house)?);
    println!(
        "RR(building,house) = {}",
        m.reduction_ratio(building, house)?
    );
    let co = m.class_overlap(house)?;
    println!(
        "CO(house)          = {} (largest sibling: {})",
        co.value,
        co.sibling.map_or("-", |s| store.display(s))
    );
    println!("H(building)        = {}", m.entropy(building)?);

    let rows = m.table()?;
    metrics::write_metrics(&store, &rows, std::io::stdout().lock())?;
    Ok(rows)
}

#[allow(dead_code)]
fn main() -> analogion::Result<()> {
    run_example().map(|_| ())
}
