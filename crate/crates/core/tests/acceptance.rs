//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on any failure.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use attk2::bits::{BitSequence, DynBitSequence, DynSequence};
use attk2::cli::{bench_dir, query_scripts, render_stats, Prng, QUERY_SETS};
use attk2::dyngraph::DynAttK2Graph;
use attk2::io::{from_bytes, load_input, to_bytes};
use attk2::k2::{DynK2Tree, K2Tree};
use attk2::oracle::NaiveStore;
use attk2::{AttK2Graph, AttrValue, GraphQueries, Kind};

use common::{all_queries, disagreement, fixture_dir, gen_bundle, mutate_both, oracle_replay, replay_orders, schema_of};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

macro_rules! check {
    ($cond:expr, $($msg:tt)+) => {
        if $cond {
        } else {
            return Err(format!($($msg)+));
        }
    };
}

fn eq<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, want {want:?}"))
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn golden() -> Outcome {
    let g = AttK2Graph::build(&load_input(&fixture_dir()).map_err(err)?, 2).map_err(err)?;
    let r = g.relations();
    eq("GetNodeType(4)", g.get_type(Kind::Node, 4).map_err(err)?, "Researcher")?;
    eq("GetEdgeType(6)", g.get_type(Kind::Edge, 6).map_err(err)?, "Reviewer")?;
    eq("ScanNodes(Researcher)", g.scan(Kind::Node, "Researcher").map_err(err)?, vec![3, 4, 5])?;
    eq("Title of 3", g.get_attribute(Kind::Node, 3, "Title").map_err(err)?, AttrValue::Undefined)?;
    eq(
        "Name of 3",
        g.get_attribute(Kind::Node, 3, "Name").map_err(err)?,
        AttrValue::Value("P. García".into()),
    )?;
    eq(
        "Expertise of 6",
        g.get_attribute(Kind::Edge, 6, "Expertise").map_err(err)?,
        AttrValue::Value("Medium".into()),
    )?;
    eq("edges_between(4,5)", g.edges_between(4, 5).map_err(err)?, vec![4, 5])?;
    eq("Multi", r.multi().iter().map(|b| b as u8).collect::<Vec<_>>(), vec![0, 0, 0, 1, 0, 0])?;
    eq("More", r.more().to_vec(), vec![4, 5])?;
    eq("Neighbors(Researcher,4)", g.neighbors("Researcher", 4).map_err(err)?, vec![5])?;
    eq("Related(Author,3)", g.related("Author", 3).map_err(err)?, vec![1])?;
    Ok("all 11 values exact".into())
}

/// Ten graph shapes up to 2000 nodes and 10^4 edges.
fn shapes() -> impl Iterator<Item = (u64, u64, u64)> {
    (0..10u64).map(|i| (200 * (i + 1), 1000 * (i + 1), 101 + i))
}

fn oracle_equivalence() -> Outcome {
    let mut total = 0;
    let mut parallel = 0;
    for (n, m, seed) in shapes() {
        let bundle = gen_bundle(n, m, seed);
        let g = AttK2Graph::build(&bundle, 2).map_err(err)?;
        let o = NaiveStore::from_bundle_sorted(&bundle);
        let queries = all_queries(&bundle, seed, 1000);
        check!(queries.len() >= 8000, "only {} queries", queries.len());
        if let Some(msg) = disagreement(&g, &o, &queries) {
            return Err(format!("graph {n}/{m}: {msg}"));
        }
        let mut pairs: Vec<_> = bundle.edges.iter().map(|e| (&e.source, &e.target)).collect();
        pairs.sort();
        parallel += pairs.windows(2).filter(|w| w[0] == w[1]).count();
        total += queries.len();
    }
    check!(parallel > 0, "no parallel edges generated");
    Ok(format!("10 graphs, {total} queries, {parallel} parallel edges, 0 mismatches"))
}

fn dynamic_equivalence() -> Outcome {
    let mut checked = 0;
    for (n, m, seed) in shapes() {
        let bundle = gen_bundle(n, m, seed);
        let sorted = NaiveStore::from_bundle_sorted(&bundle);
        let queries = all_queries(&bundle, seed, 1000);
        for (i, order) in replay_orders(&bundle, seed).iter().enumerate() {
            let mut d = DynAttK2Graph::from_bundle_in_order(&bundle, order, 2).map_err(err)?;
            if let Some(msg) = disagreement(&d, &sorted, &queries) {
                return Err(format!("graph {n}/{m} order {i}: {msg}"));
            }
            checked += queries.len();
            let mut o = oracle_replay(&bundle, order);
            let mut types = schema_of(&bundle);
            let mut rng = Prng::new(seed * 3 + i as u64);
            for round in 0..5 {
                mutate_both(&mut d, &mut o, &mut types, &mut rng, 100)
                    .map_err(|e| format!("graph {n}/{m} order {i}: {e}"))?;
                let live = d.export_bundle().map_err(err)?;
                let q = all_queries(&live, seed + round, 100);
                if let Some(msg) = disagreement(&d, &o, &q) {
                    return Err(format!("graph {n}/{m} order {i} round {round}: {msg}"));
                }
                checked += q.len();
            }
        }
    }
    Ok(format!("30 replays, 500 updates each, {checked} queries, 0 mismatches"))
}

fn bit_structures() -> Outcome {
    let mut rng = Prng::new(4);
    let mut probes = 0;
    for (len, percent) in [(1_000, 50), (100_000, 5), (1_000_000, 30), (1_000_000, 1)] {
        let bits: Vec<bool> = (0..len).map(|_| rng.chance(percent)).collect();
        let bs = BitSequence::from_bits(bits.iter().copied());
        let mut prefix = vec![0usize; len + 1];
        let mut ones = Vec::new();
        for (i, &b) in bits.iter().enumerate() {
            prefix[i + 1] = prefix[i] + b as usize;
            if b {
                ones.push(i + 1);
            }
        }
        for _ in 0..10_000 {
            let i = rng.below(len as u64 + 1) as usize;
            eq("rank1", bs.rank1(i).map_err(err)?, prefix[i])?;
            if !ones.is_empty() {
                let j = 1 + rng.below(ones.len() as u64) as usize;
                eq("select1", bs.select1(j).map_err(err)?, ones[j - 1])?;
            }
            probes += 1;
        }
    }

    for k in [2, 4] {
        for ppm in [1_000, 10_000, 100_000] {
            let n = 128u64;
            let mut matrix = vec![vec![false; 129]; 129];
            let mut cells = Vec::new();
            for r in 1..=n {
                for c in 1..=n {
                    if rng.below(1_000_000) < ppm {
                        matrix[r as usize][c as usize] = true;
                        cells.push((r, c));
                    }
                }
            }
            let t = K2Tree::build(n, &cells, k).map_err(err)?;
            for r in 1..=n {
                for c in 1..=n {
                    eq("cell", t.cell(r, c).map_err(err)?, matrix[r as usize][c as usize])?;
                }
                let row: Vec<u64> = (1..=n).filter(|&c| matrix[r as usize][c as usize]).collect();
                eq("row", t.row_neighbors(r).map_err(err)?, row)?;
                let col: Vec<u64> = (1..=n).filter(|&x| matrix[x as usize][r as usize]).collect();
                eq("column", t.col_neighbors(r).map_err(err)?, col)?;
            }
            for _ in 0..200 {
                let (a, b) = ordered(&mut rng, n);
                let (c, d) = ordered(&mut rng, n);
                let want: Vec<_> = cells
                    .iter()
                    .copied()
                    .filter(|&(r, x)| (a..=b).contains(&r) && (c..=d).contains(&x))
                    .collect();
                eq("range", t.range(a, b, c, d).map_err(err)?, want)?;
            }
        }
    }

    let mut model: Vec<bool> = Vec::new();
    let mut ds = DynBitSequence::new();
    for _ in 0..50_000 {
        let roll = rng.below(10);
        if roll < 6 || model.is_empty() {
            let p = rng.below(model.len() as u64 + 1) as usize;
            let b = rng.chance(40);
            model.insert(p, b);
            ds.insert(p + 1, b).map_err(err)?;
        } else if roll < 8 {
            let p = rng.below(model.len() as u64) as usize;
            eq("remove", ds.remove(p + 1).map_err(err)?, model.remove(p))?;
        } else {
            let p = rng.below(model.len() as u64) as usize;
            let b = rng.chance(50);
            eq("set", ds.set(p + 1, b).map_err(err)?, model[p])?;
            model[p] = b;
        }
    }
    let mut rank = 0;
    let mut seen = (0, 0);
    for (i, &b) in model.iter().enumerate() {
        eq("dynamic rank1", ds.rank1(i).map_err(err)?, rank)?;
        if b {
            rank += 1;
            seen.0 += 1;
            eq("dynamic select1", ds.select1(seen.0).map_err(err)?, i + 1)?;
        } else {
            seen.1 += 1;
            eq("dynamic select0", ds.select0(seen.1).map_err(err)?, i + 1)?;
        }
    }

    let mut syms: Vec<u32> = Vec::new();
    let mut seq = DynSequence::new();
    for _ in 0..20_000 {
        if rng.chance(75) || syms.is_empty() {
            let p = rng.below(syms.len() as u64 + 1) as usize;
            let c = rng.below(50) as u32;
            syms.insert(p, c);
            seq.insert(p + 1, c).map_err(err)?;
        } else {
            let p = rng.below(syms.len() as u64) as usize;
            eq("sequence remove", seq.remove(p + 1).map_err(err)?, syms.remove(p))?;
        }
    }
    eq("sequence contents", seq.iter().collect::<Vec<_>>(), syms.clone())?;
    let mut counts = [0usize; 50];
    for (i, &c) in syms.iter().enumerate() {
        counts[c as usize] += 1;
        eq("sequence rank", seq.rank(c, i + 1).map_err(err)?, counts[c as usize])?;
        eq("sequence select", seq.select(c, counts[c as usize]).map_err(err)?, i + 1)?;
    }

    let mut dk = DynK2Tree::new(2, 4).map_err(err)?;
    let mut set = BTreeSet::new();
    for _ in 0..20_000 {
        let (r, c) = (1 + rng.below(128), 1 + rng.below(128));
        dk.ensure_side(r.max(c));
        if rng.chance(65) {
            eq("k2 set", dk.set(r, c).map_err(err)?, set.insert((r, c)))?;
        } else {
            eq("k2 clear", dk.clear(r, c).map_err(err)?, set.remove(&(r, c)))?;
        }
    }
    eq("dynamic k2 cells", dk.cells(), set.iter().copied().collect::<Vec<_>>())?;

    Ok(format!(
        "{probes} rank/select probes, 6 matrices, {} dynamic bits, {} symbols",
        model.len(),
        syms.len()
    ))
}

fn ordered(rng: &mut Prng, n: u64) -> (u64, u64) {
    let (a, b) = (1 + rng.below(n), 1 + rng.below(n));
    (a.min(b), a.max(b))
}

fn serialization() -> Outcome {
    let bundle = gen_bundle(1500, 8000, 55);
    let g = AttK2Graph::build(&bundle, 2).map_err(err)?;
    let bytes = to_bytes(&g);
    let back = from_bytes(&bytes).map_err(err)?;
    check!(to_bytes(&back) == bytes, "second save differs");
    let probes: Vec<_> = all_queries(&bundle, 55, 125).into_iter().take(1000).collect();
    check!(probes.len() == 1000, "only {} probes", probes.len());
    if let Some(msg) = disagreement(&g, &back, &probes) {
        return Err(msg);
    }
    let mut rejected = 0;
    for i in 0..16 {
        let mut b = bytes.clone();
        b[i] ^= 0x5a;
        check!(from_bytes(&b).is_err(), "header byte {i} damage accepted");
        rejected += 1;
    }
    check!(from_bytes(&bytes[..bytes.len() / 2]).is_err(), "truncated file accepted");
    Ok(format!("{} bytes, 1000 probes equal, {rejected} damaged headers rejected", bytes.len()))
}

fn space() -> Outcome {
    let n = 1024u64;
    let want = (n * n / 100) as usize;
    let mut rng = Prng::new(6);
    let mut cells = BTreeSet::new();
    // Dense 32x32 patches near the diagonal.
    while cells.len() < want {
        let r0 = rng.below(n - 32);
        let c0 = (r0 as i64 + rng.below(129) as i64 - 64).clamp(0, (n - 32) as i64) as u64;
        for _ in 0..400 {
            cells.insert((r0 + 1 + rng.below(32), c0 + 1 + rng.below(32)));
            if cells.len() == want {
                break;
            }
        }
    }
    let cells: Vec<_> = cells.into_iter().collect();
    let t = K2Tree::build(n, &cells, 2).map_err(err)?;
    let bits = t.t().len() + t.l().len();
    check!(bits < (n * n) as usize, "|T|+|L| = {bits} bits");

    let g = AttK2Graph::build(&gen_bundle(20_000, 100_000, 1), 2).map_err(err)?;
    let report = render_stats(&g, to_bytes(&g).len() as u64);
    let bpe: f64 = report
        .lines()
        .find_map(|l| l.strip_prefix("relations_bits_per_edge\t"))
        .and_then(|v| v.parse().ok())
        .ok_or("stats lacks relations_bits_per_edge")?;
    check!(bpe < 128.0, "relations use {bpe} bits/edge");
    Ok(format!("(a) {bits} < {} bits, (b) {bpe:.2} bits/edge < 128", n * n))
}

fn performance() -> Outcome {
    let bundle = gen_bundle(20_000, 100_000, 7);
    let g = AttK2Graph::build(&bundle, 2).map_err(err)?;
    let dir = tempfile::tempdir().map_err(err)?;
    for (stem, text) in query_scripts(&bundle, 7, 1000) {
        std::fs::write(dir.path().join(format!("{stem}.tsv")), text).map_err(err)?;
    }
    let start = Instant::now();
    let rows = bench_dir(&g, dir.path(), 3).map_err(err)?;
    let took = start.elapsed();
    check!(rows.len() == QUERY_SETS.len(), "{} bench rows", rows.len());
    check!(took < Duration::from_secs(60), "bench took {took:?}");
    let slow: Vec<_> = rows.iter().filter(|r| r.qps < 1e4).map(|r| format!("{} {:.0} qps", r.set, r.qps)).collect();
    check!(slow.is_empty(), "below 10^4 qps: {}", slow.join(", "));
    let min = rows.iter().min_by(|a, b| a.qps.total_cmp(&b.qps)).unwrap();
    Ok(format!("bench {:.1}s, slowest {} at {:.0} qps", took.as_secs_f64(), min.set, min.qps))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("1 golden running example", golden, Duration::from_secs(1)),
        ("2 static store vs oracle", oracle_equivalence, Duration::from_secs(300)),
        ("3 dynamic store vs oracle", dynamic_equivalence, Duration::from_secs(600)),
        ("4 bit structures vs brute force", bit_structures, Duration::MAX),
        ("5 serialization", serialization, Duration::MAX),
        ("6 space", space, Duration::MAX),
        ("7 query throughput", performance, Duration::MAX),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(_) if took > limit => Err(format!("took {took:?}, limit {limit:?}")),
            o => o,
        };
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail} ({:.2}s)", took.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why} ({:.2}s)", took.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
