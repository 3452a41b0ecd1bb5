//! Plumbing behind the `attk2` binary: query scripts, id translation,
//! size reports, the synthetic generator and the benchmark loop.
//!
//! A query script has one query per line, fields separated by tabs and
//! escaped as in bundle files:
//!
//! ```text
//! GetNodeTypes                 GetEdgeTypes
//! ScanNodes<TAB>label          ScanEdges<TAB>label
//! GetNodeType<TAB>id           GetEdgeType<TAB>id
//! GetNodeAttribute<TAB>id<TAB>att
//! GetEdgeAttribute<TAB>id<TAB>att
//! SelectNodes<TAB>label<TAB>att<TAB>value
//! SelectEdges<TAB>label<TAB>att<TAB>value
//! Neighbors<TAB>node_label<TAB>node_id
//! Related<TAB>edge_label<TAB>node_id
//! ```
//!
//! Ids are external ids. Blank lines and lines starting with `#` are
//! skipped. Each query prints one line: tab-separated labels or external
//! ids (ids sorted bytewise), `-` when the answer is empty or the attribute
//! is undefined or absent, or `ERROR<TAB>message`.

mod bench;
mod gen;

pub use bench::{bench_dir, render_bench, BenchRow};
pub use gen::{generate, query_scripts, GenConfig, Prng, QUERY_SETS};

use std::borrow::Cow;
use std::fmt::Write as _;

use crate::dyngraph::DynAttK2Graph;
use crate::error::{Error, Result};
use crate::graph::{AttK2Graph, AttrValue, GraphQueries, Kind, Selection};
use crate::io::{escape, unescape};
use crate::oracle::NaiveStore;

/// Translation between external and internal ids.
pub trait ExtIds {
    fn ext_id(&self, kind: Kind, id: u64) -> Option<Cow<'_, str>>;
    fn int_id(&self, kind: Kind, ext: &str) -> Option<u64>;
}

impl ExtIds for AttK2Graph {
    fn ext_id(&self, kind: Kind, id: u64) -> Option<Cow<'_, str>> {
        self.id_map(kind).ext_of(id).map(Cow::Borrowed)
    }

    fn int_id(&self, kind: Kind, ext: &str) -> Option<u64> {
        self.id_map(kind).id_of(ext)
    }
}

impl ExtIds for DynAttK2Graph {
    fn ext_id(&self, kind: Kind, id: u64) -> Option<Cow<'_, str>> {
        self.ext_of(kind, id).map(Cow::Owned)
    }

    fn int_id(&self, kind: Kind, ext: &str) -> Option<u64> {
        self.id_of_ext(kind, ext).filter(|&id| self.is_live(kind, id))
    }
}

impl ExtIds for NaiveStore {
    fn ext_id(&self, kind: Kind, id: u64) -> Option<Cow<'_, str>> {
        self.ext_of(kind, id).map(Cow::Owned)
    }

    fn int_id(&self, kind: Kind, ext: &str) -> Option<u64> {
        self.id_of_ext(kind, ext)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Query {
    GetTypes(Kind),
    Scan(Kind, String),
    GetType(Kind, String),
    GetAttribute(Kind, String, String),
    Select(Kind, String, String, String),
    Neighbors(String, String),
    Related(String, String),
}

impl Query {
    /// Parses one script line (without its newline).
    pub fn parse(line: &str) -> std::result::Result<Query, String> {
        let fields = line
            .split('\t')
            .map(unescape)
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let (op, args) = fields.split_first().ok_or("empty line")?;
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(format!("{op} takes {n} argument(s), got {}", args.len()))
            }
        };
        let a = |i: usize| args[i].clone();
        let q = match op.as_str() {
            "GetNodeTypes" => arity(0).map(|_| Query::GetTypes(Kind::Node)),
            "GetEdgeTypes" => arity(0).map(|_| Query::GetTypes(Kind::Edge)),
            "ScanNodes" => arity(1).map(|_| Query::Scan(Kind::Node, a(0))),
            "ScanEdges" => arity(1).map(|_| Query::Scan(Kind::Edge, a(0))),
            "GetNodeType" => arity(1).map(|_| Query::GetType(Kind::Node, a(0))),
            "GetEdgeType" => arity(1).map(|_| Query::GetType(Kind::Edge, a(0))),
            "GetNodeAttribute" => arity(2).map(|_| Query::GetAttribute(Kind::Node, a(0), a(1))),
            "GetEdgeAttribute" => arity(2).map(|_| Query::GetAttribute(Kind::Edge, a(0), a(1))),
            "SelectNodes" => arity(3).map(|_| Query::Select(Kind::Node, a(0), a(1), a(2))),
            "SelectEdges" => arity(3).map(|_| Query::Select(Kind::Edge, a(0), a(1), a(2))),
            "Neighbors" => arity(2).map(|_| Query::Neighbors(a(0), a(1))),
            "Related" => arity(2).map(|_| Query::Related(a(0), a(1))),
            _ => Err(format!("unknown operation `{op}`")),
        }?;
        Ok(q)
    }

    pub fn render(&self) -> String {
        let (op, args): (&str, Vec<&str>) = match self {
            Query::GetTypes(Kind::Node) => ("GetNodeTypes", vec![]),
            Query::GetTypes(Kind::Edge) => ("GetEdgeTypes", vec![]),
            Query::Scan(Kind::Node, l) => ("ScanNodes", vec![l]),
            Query::Scan(Kind::Edge, l) => ("ScanEdges", vec![l]),
            Query::GetType(Kind::Node, id) => ("GetNodeType", vec![id]),
            Query::GetType(Kind::Edge, id) => ("GetEdgeType", vec![id]),
            Query::GetAttribute(Kind::Node, id, a) => ("GetNodeAttribute", vec![id, a]),
            Query::GetAttribute(Kind::Edge, id, a) => ("GetEdgeAttribute", vec![id, a]),
            Query::Select(Kind::Node, l, a, v) => ("SelectNodes", vec![l, a, v]),
            Query::Select(Kind::Edge, l, a, v) => ("SelectEdges", vec![l, a, v]),
            Query::Neighbors(l, id) => ("Neighbors", vec![l, id]),
            Query::Related(l, id) => ("Related", vec![l, id]),
        };
        let mut s = op.to_owned();
        for a in args {
            s.push('\t');
            s.push_str(&escape(a));
        }
        s
    }
}

/// Parses a whole script. Malformed lines are reported with their
/// 1-based line number.
pub fn parse_script(name: &str, text: &str) -> Result<Vec<Query>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(Query::parse(line).map_err(|msg| Error::Parse {
            file: name.to_owned(),
            line: i + 1,
            msg,
        })?);
    }
    Ok(out)
}

fn lookup<G: ExtIds>(g: &G, kind: Kind, ext: &str) -> Result<u64> {
    g.int_id(kind, ext)
        .ok_or_else(|| Error::NotFound(format!("{kind} `{ext}`")))
}

fn push_escaped(out: &mut String, s: &str) {
    if s.bytes().any(|b| matches!(b, b'\t' | b'\n' | b'\r' | b'\\' | b'=')) {
        out.push_str(&escape(s));
    } else {
        out.push_str(s);
    }
}

fn ext_list<G: ExtIds>(g: &G, kind: Kind, ids: &[u64]) -> String {
    if ids.is_empty() {
        return "-".to_owned();
    }
    let mut exts: Vec<Cow<'_, str>> = ids
        .iter()
        .map(|&id| g.ext_id(kind, id).unwrap_or(Cow::Borrowed("?")))
        .collect();
    // Ids of one label are usually already in external-id order.
    if !exts.is_sorted_by(|a, b| a.as_bytes() <= b.as_bytes()) {
        exts.sort_unstable_by(|a, b| a.as_bytes().cmp(b.as_bytes()));
    }
    let mut s = String::with_capacity(exts.len() * (exts[0].len() + 1));
    for (i, e) in exts.iter().enumerate() {
        if i > 0 {
            s.push('\t');
        }
        push_escaped(&mut s, e);
    }
    s
}

fn answer<G: GraphQueries + ExtIds>(g: &G, q: &Query) -> Result<String> {
    Ok(match q {
        Query::GetTypes(kind) => {
            let labels = g.get_types(*kind);
            if labels.is_empty() {
                "-".to_owned()
            } else {
                labels.iter().map(|l| escape(l)).collect::<Vec<_>>().join("\t")
            }
        }
        Query::Scan(kind, label) => ext_list(g, *kind, &g.scan(*kind, label)?),
        Query::GetType(kind, ext) => escape(g.get_type(*kind, lookup(g, *kind, ext)?)?),
        Query::GetAttribute(kind, ext, att) => match g.get_attribute(*kind, lookup(g, *kind, ext)?, att)? {
            AttrValue::Value(v) => escape(&v),
            AttrValue::Absent | AttrValue::Undefined => "-".to_owned(),
        },
        Query::Select(kind, label, att, value) => match g.select(*kind, label, att, value)? {
            Selection::Ids(ids) => ext_list(g, *kind, &ids),
            Selection::Undefined => "-".to_owned(),
        },
        Query::Neighbors(label, ext) => ext_list(g, Kind::Node, &g.neighbors(label, lookup(g, Kind::Node, ext)?)?),
        Query::Related(label, ext) => ext_list(g, Kind::Node, &g.related(label, lookup(g, Kind::Node, ext)?)?),
    })
}

/// One output line for `q`, without the newline.
pub fn run_query<G: GraphQueries + ExtIds>(g: &G, q: &Query) -> String {
    answer(g, q).unwrap_or_else(|e| format!("ERROR\t{}", escape(&e.to_string())))
}

pub fn run_script<G: GraphQueries + ExtIds>(g: &G, queries: &[Query]) -> String {
    let mut out = String::new();
    for q in queries {
        out.push_str(&run_query(g, q));
        out.push('\n');
    }
    out
}

/// Queries whose output lines differ between two stores, with both lines.
/// Error lines compare equal whatever their message.
pub fn mismatches<A, B>(a: &A, b: &B, queries: &[Query]) -> Vec<(Query, String, String)>
where
    A: GraphQueries + ExtIds,
    B: GraphQueries + ExtIds,
{
    let norm = |s: String| if s.starts_with("ERROR\t") { "ERROR".to_owned() } else { s };
    queries
        .iter()
        .filter_map(|q| {
            let (x, y) = (norm(run_query(a, q)), norm(run_query(b, q)));
            (x != y).then(|| (q.clone(), x, y))
        })
        .collect()
}

/// The size report printed by `attk2 stats`.
pub fn render_stats(g: &AttK2Graph, file_bytes: u64) -> String {
    let sizes = g.layer_sizes();
    let edges = g.edge_count();
    let bits_per_edge = if edges == 0 {
        0.0
    } else {
        sizes.relations as f64 * 8.0 / edges as f64
    };
    let mut s = String::new();
    let _ = writeln!(s, "nodes\t{}", g.node_count());
    let _ = writeln!(s, "edges\t{edges}");
    let _ = writeln!(s, "schema_bytes\t{}", sizes.schema);
    let _ = writeln!(s, "data_bytes\t{}", sizes.data);
    let _ = writeln!(s, "relations_bytes\t{}", sizes.relations);
    let _ = writeln!(s, "total_bytes\t{}", sizes.total());
    let _ = writeln!(s, "file_bytes\t{file_bytes}");
    let _ = writeln!(s, "relations_bits_per_edge\t{bits_per_edge:.2}");
    s
}

/// Process exit status for an error: 1 for bad input, 2 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(io) => match io.kind() {
            std::io::ErrorKind::NotFound | std::io::ErrorKind::PermissionDenied | std::io::ErrorKind::InvalidData => 1,
            _ => 2,
        },
        Error::OutOfBounds { .. } => 2,
        _ => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        let qs = [
            Query::GetTypes(Kind::Edge),
            Query::Scan(Kind::Node, "Paper".into()),
            Query::GetAttribute(Kind::Node, "n 1".into(), "Title".into()),
            Query::Select(Kind::Edge, "Colleague".into(), "Projects".into(), "a\tb=c".into()),
            Query::Related("Author".into(), "3".into()),
        ];
        for q in qs {
            assert_eq!(Query::parse(&q.render()).unwrap(), q);
        }
    }

    #[test]
    fn arity_and_unknown_ops() {
        assert!(Query::parse("GetNodeType").is_err());
        assert!(Query::parse("GetNodeTypes\tx").is_err());
        assert!(Query::parse("Frobnicate\t1").is_err());
        let e = parse_script("q.tsv", "GetNodeTypes\n\n# c\nScanNodes\n").unwrap_err();
        assert_eq!(e.to_string(), "q.tsv:4: ScanNodes takes 1 argument(s), got 0");
    }

    #[test]
    fn empty_script() {
        assert!(parse_script("q", "").unwrap().is_empty());
    }
}
