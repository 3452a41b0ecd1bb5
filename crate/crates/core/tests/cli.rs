mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::fixture_dir;

fn attk2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_attk2")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = attk2(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn build_example(dir: &Path) -> String {
    let db = dir.join("example.db");
    let out = ok(&["build", "--input", p(&fixture_dir()), "--output", p(&db)]);
    let keys: Vec<&str> = out.lines().map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(keys, ["schema_bytes", "data_bytes", "relations_bytes"]);
    assert!(dir.join("ids.tsv").exists());
    db.to_str().unwrap().to_owned()
}

fn gen(dir: &Path, nodes: u64, edges: u64, seed: u64) {
    ok(&[
        "gen",
        "--nodes",
        &nodes.to_string(),
        "--edges",
        &edges.to_string(),
        "--node-types",
        "3",
        "--edge-types",
        "2",
        "--attrs",
        "4",
        "--seed",
        &seed.to_string(),
        "--output",
        p(dir),
    ]);
}

#[test]
fn query_answers_on_the_running_example() {
    let tmp = tempfile::tempdir().unwrap();
    let db = build_example(tmp.path());
    let script = tmp.path().join("q.tsv");
    fs::write(
        &script,
        "GetNodeType\t4\nRelated\tAuthor\t3\nGetNodeAttribute\t3\tTitle\nScanNodes\tNone\n\n# comment\nNeighbors\tResearcher\t4\n",
    )
    .unwrap();
    let out = ok(&["query", "--db", &db, "--script", p(&script)]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0], "Researcher");
    assert_eq!(lines[1], "1");
    assert_eq!(lines[2], "-");
    assert!(lines[3].starts_with("ERROR\t"));
    assert_eq!(lines[4], "5");
    assert_eq!(ok(&["query", "--db", &db, "--script", p(&script), "--dynamic"]), out);

    fs::write(&script, "").unwrap();
    assert_eq!(ok(&["query", "--db", &db, "--script", p(&script)]), "");
}

#[test]
fn input_errors_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("missing");
    let out = attk2(&["build", "--input", p(&missing), "--output", p(&tmp.path().join("x.db"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("attk2: "));

    let bad = tmp.path().join("bad");
    fs::create_dir(&bad).unwrap();
    for f in ["schema.tsv", "nodes.tsv", "edges.tsv"] {
        fs::copy(fixture_dir().join(f), bad.join(f)).unwrap();
    }
    fs::write(bad.join("edges.tsv"), "e1\tAuthor\tnowhere\tnowhere\n").unwrap();
    let out = attk2(&["build", "--input", p(&bad), "--output", p(&tmp.path().join("y.db"))]);
    assert_eq!(out.status.code(), Some(1));

    let db = build_example(tmp.path());
    let script = tmp.path().join("q.tsv");
    fs::write(&script, "GetNodeType\n").unwrap();
    assert_eq!(attk2(&["query", "--db", &db, "--script", p(&script)]).status.code(), Some(1));

    let junk = tmp.path().join("junk.db");
    fs::write(&junk, b"not a store").unwrap();
    assert_eq!(attk2(&["stats", "--db", p(&junk)]).status.code(), Some(1));
    assert_eq!(attk2(&["build", "--bogus"]).status.code(), Some(1));
    assert_eq!(attk2(&["--help"]).status.code(), Some(0));
}

#[test]
fn gen_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    gen(&a, 50, 300, 7);
    gen(&b, 50, 300, 7);
    gen(&c, 50, 300, 8);
    let files = |d: &Path| {
        let mut v: Vec<_> = walk(d).into_iter().map(|f| (f.strip_prefix(d).unwrap().to_owned(), fs::read(&f).unwrap())).collect();
        v.sort();
        v
    };
    let fa = files(&a);
    assert_eq!(fa.len(), 3 + 8);
    assert_eq!(fa, files(&b));
    assert_ne!(fa, files(&c));
    for f in walk(&a.join("queries")) {
        assert_eq!(fs::read_to_string(f).unwrap().lines().count(), 1000);
    }
}

fn walk(d: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in fs::read_dir(d).unwrap() {
        let path = e.unwrap().path();
        if path.is_dir() {
            out.extend(walk(&path));
        } else {
            out.push(path);
        }
    }
    out
}

#[test]
fn tiny_generated_graph_builds_and_has_parallel_edges() {
    let tmp = tempfile::tempdir().unwrap();
    let g = tmp.path().join("g");
    gen(&g, 5, 7, 1);
    let db = tmp.path().join("g.db");
    ok(&["build", "--input", p(&g), "--output", p(&db)]);

    let dense = tmp.path().join("dense");
    gen(&dense, 3, 12, 2);
    let bundle = attk2::io::load_input(&dense).unwrap();
    let mut pairs: Vec<_> = bundle.edges.iter().map(|e| (&e.source, &e.target)).collect();
    pairs.sort();
    assert!(pairs.windows(2).any(|w| w[0] == w[1]));
}

#[test]
fn dynamic_output_matches_static_on_generated_scripts() {
    let tmp = tempfile::tempdir().unwrap();
    let g = tmp.path().join("g");
    gen(&g, 300, 1500, 3);
    let db = tmp.path().join("g.db");
    ok(&["build", "--input", p(&g), "--output", p(&db)]);
    for f in walk(&g.join("queries")) {
        let a = ok(&["query", "--db", p(&db), "--script", p(&f)]);
        let b = ok(&["query", "--db", p(&db), "--script", p(&f), "--dynamic"]);
        assert_eq!(a.lines().count(), 1000);
        assert_eq!(a, b, "{}", f.display());
    }
}

#[test]
fn bench_reports_eight_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let g = tmp.path().join("g");
    gen(&g, 40, 200, 4);
    let db = build_example(tmp.path());
    let scripts = g.join("queries");
    // Generated ids do not exist in the running example; errors are timed too.
    let once = ok(&["bench", "--db", &db, "--scripts", p(&scripts)]);
    let rows: Vec<Vec<&str>> = once.lines().map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows[0], ["set", "queries", "mean_us", "median_us", "p99_us", "qps"]);
    assert_eq!(rows.len(), 9);
    assert!(rows[1..].iter().all(|r| r[1] == "1000"));
    let thrice = ok(&["bench", "--db", &db, "--scripts", p(&scripts), "--repeat", "3"]);
    assert!(thrice.lines().skip(1).all(|l| l.split('\t').nth(1) == Some("3000")));
}

#[test]
fn stats_report() {
    let tmp = tempfile::tempdir().unwrap();
    let db = build_example(tmp.path());
    let out = ok(&["stats", "--db", &db]);
    let get = |k: &str| {
        out.lines()
            .find_map(|l| l.strip_prefix(k)?.strip_prefix('\t'))
            .unwrap_or_else(|| panic!("missing {k}"))
            .to_owned()
    };
    assert_eq!(get("nodes"), "5");
    assert_eq!(get("edges"), "7");
    assert!(get("relations_bits_per_edge").parse::<f64>().unwrap() > 0.0);
    assert_eq!(get("file_bytes"), fs::metadata(&db).unwrap().len().to_string());

    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    for f in ["schema.tsv", "nodes.tsv", "edges.tsv"] {
        fs::write(empty.join(f), "").unwrap();
    }
    let edb = tmp.path().join("sub/empty.db");
    ok(&["build", "--input", p(&empty), "--output", p(&edb)]);
    let out = ok(&["stats", "--db", p(&edb)]);
    for key in ["nodes", "edges", "relations_bits_per_edge"] {
        let v = out.lines().find_map(|l| l.strip_prefix(key)?.strip_prefix('\t')).unwrap();
        assert_eq!(v.parse::<f64>().unwrap(), 0.0, "{key}");
    }
}

#[test]
fn clustered_graph_stays_under_32_bits_per_edge() {
    let tmp = tempfile::tempdir().unwrap();
    let g = tmp.path().join("g");
    ok(&[
        "gen", "--nodes", "10000", "--edges", "100000", "--node-types", "4", "--edge-types", "5",
        "--attrs", "6", "--seed", "1", "--output", p(&g),
    ]);
    let db = tmp.path().join("g.db");
    ok(&["build", "--input", p(&g), "--output", p(&db)]);
    let out = ok(&["stats", "--db", p(&db)]);
    let bpe: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("relations_bits_per_edge\t"))
        .unwrap()
        .parse()
        .unwrap();
    assert!(bpe < 32.0, "{bpe}");
}
