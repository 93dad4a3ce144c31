macro_rules! example {
    ($name:ident, $file:literal) => {
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(ingest_example, "ingest.rs");
example!(probe_example, "probe.rs");
example!(metrics_example, "metrics.rs");
example!(candidates_example, "candidates.rs");
example!(benchmark_example, "benchmark.rs");
example!(eval_example, "eval.rs");

#[test]
fn ingest_example_runs() {
    let store = ingest_example::run_example().unwrap();
    assert_eq!(store.class_count(), 20);
}

#[test]
fn probe_example_runs() {
    let coverage = probe_example::run_example().unwrap();
    assert_eq!((coverage.total, coverage.with_qualifier), (20, 4));
}

#[test]
fn metrics_example_runs() {
    assert_eq!(metrics_example::run_example().unwrap().len(), 3);
}

#[test]
fn candidates_example_runs() {
    assert_eq!(candidates_example::run_example().unwrap().len(), 4);
}

#[test]
fn benchmark_example_runs() {
    assert_eq!(benchmark_example::run_example().unwrap().len(), 200);
}

#[test]
fn eval_example_runs() {
    let report = eval_example::run_example().unwrap();
    assert_eq!(report.best.accuracy, 1.0);
}
