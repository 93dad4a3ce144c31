use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use analogion::cli::{read_manifest, sha256_hex};
use analogion::synth::BenchmarkOntology;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn analogion(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_analogion"))
        .args(args)
        .output()
        .unwrap()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn check_manifest(dir: &Path, command: &str) {
    let text = fs::read_to_string(dir.join(format!("{command}.manifest.tsv"))).unwrap();
    let m = read_manifest(&text);
    for (name, _, digest) in &m["artifact"] {
        assert_eq!(
            &sha256_hex(&fs::read(dir.join(name)).unwrap()),
            digest,
            "{name}"
        );
    }
    for (_, path, digest) in &m["input"] {
        assert_eq!(&sha256_hex(&fs::read(path).unwrap()), digest, "{path}");
    }
}

#[test]
fn metrics_on_fix_a() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("m");
    let o = analogion(&[
        "metrics",
        "--edges",
        arg(&fixture("fix_a.tsv")),
        "-o",
        arg(&out),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let tsv = fs::read_to_string(out.join("metrics.tsv")).unwrap();
    assert_eq!(tsv.lines().count(), 1 + 3);
    check_manifest(&out, "metrics");
}

#[test]
fn candidates_on_fix_b_rerun_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let o = analogion(&[
            "candidates",
            "--edges",
            arg(&fixture("fix_b.tsv")),
            "-o",
            arg(dir),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    let cands = fs::read_to_string(a.join("candidates.tsv")).unwrap();
    assert!(cands.contains("sibling\tQ11424\tQ3305213\tQ4502142"));
    assert!(cands.contains("parent-child\tQ68\tQ121117\t"));
    for f in ["candidates.tsv", "analogies.tsv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
    }
    check_manifest(&a, "candidates");
}

#[test]
fn config_file_is_overridden_by_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.conf");
    let out = tmp.path().join("o");
    fs::write(
        &cfg,
        format!(
            "# FIX-B with an impossible threshold\nedges = {}\nic_min = 999999\nout = {}\n",
            fixture("fix_b.tsv").display(),
            out.display()
        ),
    )
    .unwrap();
    assert_eq!(
        analogion(&["filter", "--config", arg(&cfg)]).status.code(),
        Some(0)
    );
    assert_eq!(
        fs::read_to_string(out.join("filter.manifest.tsv"))
            .unwrap()
            .matches("config\tic_min\t999999")
            .count(),
        1
    );
    assert_eq!(
        fs::read_to_string(out.join("candidates.tsv"))
            .unwrap()
            .lines()
            .count(),
        1
    );
    assert_eq!(
        analogion(&["filter", "--config", arg(&cfg), "--ic-min", "1000"])
            .status
            .code(),
        Some(0)
    );
    assert!(
        fs::read_to_string(out.join("candidates.tsv"))
            .unwrap()
            .lines()
            .count()
            > 1
    );
}

fn write_benchmark_inputs(dir: &Path) -> (PathBuf, PathBuf, PathBuf) {
    let onto = BenchmarkOntology::new();
    let (edges, ann, vecs) = (
        dir.join("edges.tsv"),
        dir.join("ann.tsv"),
        dir.join("vectors.txt"),
    );
    fs::write(&edges, onto.edge_file()).unwrap();
    fs::write(&ann, onto.annotation_file()).unwrap();
    fs::write(&vecs, onto.embedding_file(50, 0.2, 0.01, 1)).unwrap();
    (edges, ann, vecs)
}

#[test]
fn benchmark_then_eval() {
    let tmp = tempfile::tempdir().unwrap();
    let (edges, ann, vecs) = write_benchmark_inputs(tmp.path());
    let out = tmp.path().join("run");
    let o = analogion(&[
        "benchmark",
        "--edges",
        arg(&edges),
        "--annotations",
        arg(&ann),
        "--seed",
        "7",
        "-o",
        arg(&out),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let dataset = out.join("dataset.tsv");
    assert_eq!(fs::read_to_string(&dataset).unwrap().lines().count(), 201);

    let v = analogion(&[
        "benchmark",
        "--edges",
        arg(&edges),
        "--validate",
        arg(&dataset),
        "-o",
        arg(&out),
    ]);
    assert_eq!(v.status.code(), Some(0));

    let o = analogion(&[
        "eval",
        "--edges",
        arg(&edges),
        "--dataset",
        arg(&dataset),
        "--embeddings",
        arg(&vecs),
        "--seed",
        "7",
        "--export-sentences",
        "-o",
        arg(&out),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let report = fs::read_to_string(out.join("eval.tsv")).unwrap();
    assert!(report.contains("accuracy\t1.000000"));
    assert!(out.join("histogram.tsv").exists() && out.join("sentences.tsv").exists());
    check_manifest(&out, "eval");

    // Scores from a file go through the same evaluation.
    let scores = tmp.path().join("scores.tsv");
    let mut text = String::from("quad_index\tscore\n");
    for (i, line) in fs::read_to_string(&dataset)
        .unwrap()
        .lines()
        .skip(1)
        .enumerate()
    {
        let positive = line.split('\t').nth(4) == Some("1");
        text.push_str(&format!("{i}\t{}\n", if positive { 0.7 } else { 0.1 }));
    }
    fs::write(&scores, text).unwrap();
    let o = analogion(&[
        "eval",
        "--edges",
        arg(&edges),
        "--dataset",
        arg(&dataset),
        "--scores",
        arg(&scores),
        "--seed",
        "1",
        "-o",
        arg(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn user_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let (edges, ann, _) = write_benchmark_inputs(tmp.path());
    let out = tmp.path().join("x");

    let o = analogion(&[
        "benchmark",
        "--edges",
        arg(&edges),
        "--annotations",
        arg(&ann),
        "-o",
        arg(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--seed"));

    let o = analogion(&["nonsense"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));

    let o = analogion(&[
        "metrics",
        "--edges",
        arg(&tmp.path().join("missing.tsv")),
        "-o",
        arg(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));

    let cyclic = tmp.path().join("cyclic.tsv");
    fs::write(
        &cyclic,
        "id\tnode1\tlabel\tnode2\ns1\tQ1\tP279\tQ2\ns2\tQ2\tP279\tQ1\n",
    )
    .unwrap();
    assert_eq!(
        analogion(&["ingest", "--edges", arg(&cyclic), "-o", arg(&out)])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        analogion(&["metrics", "--edges", arg(&cyclic), "-o", arg(&out)])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        analogion(&[
            "metrics",
            "--edges",
            arg(&cyclic),
            "--cycle-policy",
            "break",
            "-o",
            arg(&out)
        ])
        .status
        .code(),
        Some(0)
    );

    let o = Command::new(env!("CARGO_BIN_EXE_analogion"))
        .args(["ingest", "--edges", arg(&edges), "-o", arg(&out)])
        .env("ANALOGION_THREADS", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn all_out_of_vocabulary_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let (edges, ann, _) = write_benchmark_inputs(tmp.path());
    let out = tmp.path().join("o");
    assert_eq!(
        analogion(&[
            "benchmark",
            "--edges",
            arg(&edges),
            "--annotations",
            arg(&ann),
            "--seed",
            "3",
            "-o",
            arg(&out)
        ])
        .status
        .code(),
        Some(0)
    );
    let vecs = tmp.path().join("unrelated.txt");
    fs::write(&vecs, "2 2\nzebra 1 0\nquartz 0 1\n").unwrap();
    let o = analogion(&[
        "eval",
        "--edges",
        arg(&edges),
        "--dataset",
        arg(&out.join("dataset.tsv")),
        "--embeddings",
        arg(&vecs),
        "--seed",
        "1",
        "-o",
        arg(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no scorable quads"));
}

#[test]
fn thread_count_does_not_change_output() {
    let tmp = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4", "0"] {
        let dir = tmp.path().join(threads);
        let o = Command::new(env!("CARGO_BIN_EXE_analogion"))
            .args([
                "candidates",
                "--edges",
                arg(&fixture("fix_b.tsv")),
                "-o",
                arg(&dir),
            ])
            .env("ANALOGION_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        outputs.push((
            fs::read(dir.join("candidates.tsv")).unwrap(),
            fs::read(dir.join("analogies.tsv")).unwrap(),
        ));
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}
