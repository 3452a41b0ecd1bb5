use std::fmt::Write as _;
use std::fs;
use std::hint::black_box;
use std::path::Path;
use std::time::Instant;

use super::{parse_script, run_query, ExtIds};
use crate::error::Result;
use crate::graph::GraphQueries;

/// Timings for one query set.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub set: String,
    /// Timed executions: queries in the script times the repeat count.
    pub samples: usize,
    pub mean_us: f64,
    pub median_us: f64,
    pub p99_us: f64,
    pub qps: f64,
}

fn row(set: String, mut ns: Vec<u64>) -> BenchRow {
    ns.sort_unstable();
    let n = ns.len();
    let total: u64 = ns.iter().sum();
    let at = |q: f64| {
        if n == 0 {
            0.0
        } else {
            ns[((n as f64 * q).ceil() as usize).clamp(1, n) - 1] as f64 / 1000.0
        }
    };
    BenchRow {
        set,
        samples: n,
        mean_us: if n == 0 { 0.0 } else { total as f64 / n as f64 / 1000.0 },
        median_us: at(0.5),
        p99_us: at(0.99),
        qps: if total == 0 { 0.0 } else { n as f64 * 1e9 / total as f64 },
    }
}

/// Runs every `*.tsv` script in `dir` (sorted by name) `repeat` times,
/// timing each query on its own.
pub fn bench_dir<G: GraphQueries + ExtIds>(g: &G, dir: &Path, repeat: usize) -> Result<Vec<BenchRow>> {
    let mut files: Vec<_> = fs::read_dir(dir)?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "tsv"))
        .collect();
    files.sort();
    let mut rows = Vec::new();
    for path in files {
        let name = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
        let queries = parse_script(&name, &fs::read_to_string(&path)?)?;
        let mut ns = Vec::with_capacity(queries.len() * repeat);
        for _ in 0..repeat {
            for q in &queries {
                let t = Instant::now();
                black_box(run_query(g, black_box(q)));
                ns.push(t.elapsed().as_nanos() as u64);
            }
        }
        let set = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        rows.push(row(set, ns));
    }
    Ok(rows)
}

pub fn render_bench(rows: &[BenchRow]) -> String {
    let mut s = "set\tqueries\tmean_us\tmedian_us\tp99_us\tqps\n".to_owned();
    for r in rows {
        let _ = writeln!(
            s,
            "{}\t{}\t{:.3}\t{:.3}\t{:.3}\t{:.0}",
            r.set, r.samples, r.mean_us, r.median_us, r.p99_us, r.qps
        );
    }
    s
}
