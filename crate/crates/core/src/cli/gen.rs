//! Seeded synthetic graphs and query sets.
//!
//! All randomness comes from xoshiro256++ seeded through SplitMix64
//! (`seed_from_u64`), so output is byte-identical for a given seed.

use std::collections::HashMap;

use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use super::Query;
use crate::error::{Error, Result};
use crate::graph::Kind;
use crate::io::{AttributeDecl, EdgeRecord, InputBundle, NodeRecord, TypeDecl};

/// Stems of the eight query-set files, in set order.
pub const QUERY_SETS: [&str; 8] = [
    "q1_GetNodeType",
    "q2_GetEdgeType",
    "q3_GetNodeAttribute",
    "q4_GetEdgeAttribute",
    "q5_SelectNodes",
    "q6_SelectEdges",
    "q7_Neighbors",
    "q8_Related",
];

// Values for low-cardinality attributes. Some need escaping on purpose.
const WORDS: [&str; 8] = ["low", "medium", "high", "a=b", "tab\there", "two words", "", "back\\slash"];

pub struct Prng(Xoshiro256PlusPlus);

impl Prng {
    pub fn new(seed: u64) -> Self {
        Prng(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    /// True with probability `percent`/100.
    pub fn chance(&mut self, percent: u64) -> bool {
        self.below(100) < percent
    }

    pub fn shuffle<T>(&mut self, v: &mut [T]) {
        for i in (1..v.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            v.swap(i, j);
        }
    }

    fn pick<'a, T>(&mut self, v: &'a [T]) -> Option<&'a T> {
        if v.is_empty() {
            None
        } else {
            Some(&v[self.below(v.len() as u64) as usize])
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenConfig {
    pub nodes: u64,
    pub edges: u64,
    pub node_types: u32,
    pub edge_types: u32,
    /// Attribute names per kind; each type draws a subset.
    pub attrs: u32,
    pub seed: u64,
}

fn pad_width(n: u64) -> usize {
    n.to_string().len().max(6)
}

struct AttrPool {
    names: Vec<String>,
    // Distinct values of each low-cardinality attribute; 0 marks a
    // high-cardinality one.
    small_domain: Vec<u64>,
}

impl AttrPool {
    /// Low-cardinality attributes get at most about sqrt(population)/2
    /// distinct values and are declared dense.
    fn new(prefix: &str, count: u32, population: u64, rng: &mut Prng) -> Self {
        let names = (0..count).map(|j| format!("{prefix}{j}")).collect();
        let spread = (population.isqrt() / 2).max(2);
        let small_domain = (0..count)
            .map(|j| if j % 2 == 0 { 2 + rng.below(spread - 1) } else { 0 })
            .collect();
        AttrPool { names, small_domain }
    }

    fn decls_for(&self, t: usize, rng: &mut Prng) -> Vec<usize> {
        if self.names.is_empty() {
            return Vec::new();
        }
        let forced = t % self.names.len();
        (0..self.names.len())
            .filter(|&j| j == forced || rng.chance(50))
            .collect()
    }

    fn value(&self, j: usize, population: u64, rng: &mut Prng) -> String {
        match self.small_domain[j] {
            0 => format!("v{}", rng.below((population / 2).max(4))),
            d => match rng.below(d) as usize {
                w if w < WORDS.len() => WORDS[w].to_owned(),
                w => format!("c{w}"),
            },
        }
    }

    fn declare(&self, picked: &[usize]) -> Vec<AttributeDecl> {
        picked
            .iter()
            .map(|&j| AttributeDecl {
                name: self.names[j].clone(),
                dense: self.small_domain[j] != 0,
            })
            .collect()
    }
}

fn draw_attrs(pool: &AttrPool, picked: &[usize], population: u64, rng: &mut Prng) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for &j in picked {
        if rng.chance(85) {
            out.push((pool.names[j].clone(), pool.value(j, population, rng)));
        }
    }
    out
}

/// A random graph: contiguous node-type blocks, clustered edges and
/// roughly 10% parallel edges. Types that would be empty are not created.
pub fn generate(cfg: &GenConfig) -> Result<InputBundle> {
    if cfg.nodes == 0 && cfg.edges > 0 {
        return Err(Error::InvalidInput("edges need at least one node".into()));
    }
    if cfg.nodes > 0 && cfg.node_types == 0 {
        return Err(Error::InvalidInput("nodes need at least one node type".into()));
    }
    if cfg.edges > 0 && cfg.edge_types == 0 {
        return Err(Error::InvalidInput("edges need at least one edge type".into()));
    }
    let mut rng = Prng::new(cfg.seed);
    let n = cfg.nodes;
    let m = cfg.edges;
    let nt = (cfg.node_types as u64).min(n) as usize;
    let et = (cfg.edge_types as u64).min(m) as usize;

    // Block boundaries: nt-1 distinct cuts in 1..n.
    let mut cuts = Vec::new();
    if nt > 1 {
        let mut seen = std::collections::HashSet::new();
        while cuts.len() < nt - 1 {
            let c = 1 + rng.below(n - 1);
            if seen.insert(c) {
                cuts.push(c);
            }
        }
        cuts.sort_unstable();
    }
    cuts.push(n);
    let mut node_type = Vec::with_capacity(n as usize);
    let mut start = 0;
    for (t, &end) in cuts.iter().enumerate().take(nt) {
        node_type.extend(std::iter::repeat_n(t, (end - start) as usize));
        start = end;
    }

    let node_pool = AttrPool::new("nattr", cfg.attrs, n, &mut rng);
    let edge_pool = AttrPool::new("eattr", cfg.attrs, m, &mut rng);
    let mut bundle = InputBundle::default();
    let node_picks: Vec<Vec<usize>> = (0..nt).map(|t| node_pool.decls_for(t, &mut rng)).collect();
    let edge_picks: Vec<Vec<usize>> = (0..et).map(|t| edge_pool.decls_for(t, &mut rng)).collect();
    for (t, picked) in node_picks.iter().enumerate() {
        bundle.types.push(TypeDecl {
            kind: Kind::Node,
            label: format!("N{t}"),
            attributes: node_pool.declare(picked),
        });
    }
    for (t, picked) in edge_picks.iter().enumerate() {
        bundle.types.push(TypeDecl {
            kind: Kind::Edge,
            label: format!("E{t}"),
            attributes: edge_pool.declare(picked),
        });
    }

    let wn = pad_width(n);
    for (i, &t) in node_type.iter().enumerate() {
        bundle.nodes.push(NodeRecord {
            ext_id: format!("n{i:0wn$}"),
            label: format!("N{t}"),
            attrs: draw_attrs(&node_pool, &node_picks[t], n, &mut rng),
        });
    }

    let we = pad_width(m);
    let mut pairs: Vec<(u64, u64)> = Vec::with_capacity(m as usize);
    for i in 0..m {
        let t = if (i as usize) < et { i as usize } else { rng.below(et as u64) as usize };
        let (u, v) = if !pairs.is_empty() && rng.chance(10) {
            *rng.pick(&pairs).expect("non-empty")
        } else {
            let u = rng.below(n);
            let v = if rng.chance(70) {
                let off = rng.below(33) as i64 - 16;
                (u as i64 + off).rem_euclid(n as i64) as u64
            } else {
                rng.below(n)
            };
            (u, v)
        };
        pairs.push((u, v));
        bundle.edges.push(EdgeRecord {
            ext_id: format!("e{i:0we$}"),
            label: format!("E{t}"),
            source: format!("n{u:0wn$}"),
            target: format!("n{v:0wn$}"),
            attrs: draw_attrs(&edge_pool, &edge_picks[t], m, &mut rng),
        });
    }

    rng.shuffle(&mut bundle.nodes);
    rng.shuffle(&mut bundle.edges);
    Ok(bundle)
}

struct Population<'a> {
    labels: Vec<&'a str>,
    label_of: Vec<&'a str>,
    ids: Vec<&'a str>,
    by_label: HashMap<&'a str, Vec<usize>>,
    attrs: Vec<&'a [(String, String)]>,
}

impl<'a> Population<'a> {
    fn new(records: impl Iterator<Item = (&'a str, &'a str, &'a [(String, String)])>) -> Self {
        let mut p = Population {
            labels: Vec::new(),
            label_of: Vec::new(),
            ids: Vec::new(),
            by_label: HashMap::new(),
            attrs: Vec::new(),
        };
        for (ext, label, attrs) in records {
            p.by_label.entry(label).or_default().push(p.ids.len());
            p.ids.push(ext);
            p.label_of.push(label);
            p.attrs.push(attrs);
        }
        p.labels = p.by_label.keys().copied().collect();
        p.labels.sort_unstable();
        p
    }

    fn id(&self, rng: &mut Prng, missing: &str) -> String {
        rng.pick(&self.ids).map_or(missing, |s| s).to_owned()
    }
}

fn attribute_query(bundle: &InputBundle, pop: &Population, kind: Kind, rng: &mut Prng) -> Query {
    let Some(i) = (!pop.ids.is_empty()).then(|| rng.below(pop.ids.len() as u64) as usize) else {
        return Query::GetAttribute(kind, "missing".into(), "missing".into());
    };
    let label = pop.label_of[i];
    let declared = bundle.type_decl(kind, label).map_or(&[][..], |t| &t.attributes[..]);
    let att = if declared.is_empty() || rng.chance(10) {
        "undeclared".to_owned()
    } else {
        rng.pick(declared).expect("non-empty").name.clone()
    };
    Query::GetAttribute(kind, pop.ids[i].to_owned(), att)
}

fn select_query(bundle: &InputBundle, pop: &Population, kind: Kind, rng: &mut Prng) -> Query {
    let Some(&label) = rng.pick(&pop.labels) else {
        return Query::Select(kind, "missing".into(), "missing".into(), "missing".into());
    };
    let declared = bundle.type_decl(kind, label).map_or(&[][..], |t| &t.attributes[..]);
    let Some(att) = rng.pick(declared).map(|a| a.name.clone()) else {
        return Query::Select(kind, label.into(), "undeclared".into(), "x".into());
    };
    let mut value = "no such value".to_owned();
    if rng.chance(85) {
        let members = &pop.by_label[label];
        let owner = *rng.pick(members).expect("non-empty");
        if let Some((_, v)) = pop.attrs[owner].iter().find(|(a, _)| *a == att) {
            value = v.clone();
        }
    }
    Query::Select(kind, label.into(), att, value)
}

/// The eight query sets for `bundle`, `count` queries each, as
/// `(file stem, script text)` pairs. Ids and values are drawn from the
/// bundle so most queries hit.
pub fn query_scripts(bundle: &InputBundle, seed: u64, count: usize) -> Vec<(String, String)> {
    let mut rng = Prng::new(seed ^ 0x9e37_79b9_7f4a_7c15);
    let nodes = Population::new(
        bundle
            .nodes
            .iter()
            .map(|r| (r.ext_id.as_str(), r.label.as_str(), &r.attrs[..])),
    );
    let edges = Population::new(
        bundle
            .edges
            .iter()
            .map(|r| (r.ext_id.as_str(), r.label.as_str(), &r.attrs[..])),
    );
    let edge_labels: Vec<&str> = bundle
        .types
        .iter()
        .filter(|t| t.kind == Kind::Edge)
        .map(|t| t.label.as_str())
        .collect();
    let mut out = Vec::new();
    for (set, stem) in QUERY_SETS.iter().enumerate() {
        let mut text = String::new();
        for _ in 0..count {
            let q = match set {
                0 => Query::GetType(Kind::Node, nodes.id(&mut rng, "missing")),
                1 => Query::GetType(Kind::Edge, edges.id(&mut rng, "missing")),
                2 => attribute_query(bundle, &nodes, Kind::Node, &mut rng),
                3 => attribute_query(bundle, &edges, Kind::Edge, &mut rng),
                4 => select_query(bundle, &nodes, Kind::Node, &mut rng),
                5 => select_query(bundle, &edges, Kind::Edge, &mut rng),
                6 => {
                    let label = rng.pick(&nodes.labels).map_or("missing", |s| s).to_owned();
                    Query::Neighbors(label, nodes.id(&mut rng, "missing"))
                }
                _ => {
                    let label = rng.pick(&edge_labels).map_or("missing", |s| s).to_owned();
                    Query::Related(label, nodes.id(&mut rng, "missing"))
                }
            };
            text.push_str(&q.render());
            text.push('\n');
        }
        out.push((stem.to_string(), text));
    }
    out
}
