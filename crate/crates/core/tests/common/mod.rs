#![allow(dead_code)]

use std::path::PathBuf;

use attk2::cli::{generate, mismatches, parse_script, query_scripts, GenConfig, Prng, Query};
use attk2::dyngraph::{DynAttK2Graph, ReplayStep};
use attk2::io::InputBundle;
use attk2::oracle::NaiveStore;
use attk2::{GraphQueries, Kind};

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/running_example")
}

pub fn gen_bundle(nodes: u64, edges: u64, seed: u64) -> InputBundle {
    generate(&GenConfig {
        nodes,
        edges,
        node_types: 4,
        edge_types: 5,
        attrs: 6,
        seed,
    })
    .expect("generator config is valid")
}

/// The eight generated query sets plus the type and scan operations.
pub fn all_queries(bundle: &InputBundle, seed: u64, per_set: usize) -> Vec<Query> {
    let mut out = vec![Query::GetTypes(Kind::Node), Query::GetTypes(Kind::Edge)];
    for t in &bundle.types {
        out.push(Query::Scan(t.kind, t.label.clone()));
    }
    out.push(Query::Scan(Kind::Node, "NoSuchLabel".into()));
    for (name, text) in query_scripts(bundle, seed, per_set) {
        out.extend(parse_script(&name, &text).expect("generated scripts parse"));
    }
    out
}

/// Describes up to five disagreements, or `None` when the stores agree.
pub fn disagreement<A, B>(a: &A, b: &B, queries: &[Query]) -> Option<String>
where
    A: GraphQueries + attk2::cli::ExtIds,
    B: GraphQueries + attk2::cli::ExtIds,
{
    let bad = mismatches(a, b, queries);
    if bad.is_empty() {
        return None;
    }
    let mut s = format!("{} of {} queries differ", bad.len(), queries.len());
    for (q, x, y) in bad.iter().take(5) {
        s.push_str(&format!("\n  {}\n    left:  {x}\n    right: {y}", q.render()));
    }
    Some(s)
}

/// Three insertion orders: file order, all nodes then all edges shuffled,
/// and a random interleaving where each edge follows its endpoints.
pub fn replay_orders(bundle: &InputBundle, seed: u64) -> Vec<Vec<ReplayStep>> {
    let mut rng = Prng::new(seed);
    let file: Vec<ReplayStep> = (0..bundle.nodes.len())
        .map(ReplayStep::Node)
        .chain((0..bundle.edges.len()).map(ReplayStep::Edge))
        .collect();

    let mut nodes: Vec<usize> = (0..bundle.nodes.len()).collect();
    let mut edges: Vec<usize> = (0..bundle.edges.len()).collect();
    rng.shuffle(&mut nodes);
    rng.shuffle(&mut edges);
    let split: Vec<ReplayStep> = nodes
        .iter()
        .map(|&i| ReplayStep::Node(i))
        .chain(edges.iter().map(|&i| ReplayStep::Edge(i)))
        .collect();

    rng.shuffle(&mut nodes);
    let mut position = std::collections::HashMap::new();
    for (p, &i) in nodes.iter().enumerate() {
        position.insert(bundle.nodes[i].ext_id.as_str(), p);
    }
    // Each edge goes right after its later endpoint, in random order.
    let mut after: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for &e in &edges {
        let r = &bundle.edges[e];
        let p = position[r.source.as_str()].max(position[r.target.as_str()]);
        after[p].push(e);
    }
    let mut mixed = Vec::new();
    for (p, &i) in nodes.iter().enumerate() {
        mixed.push(ReplayStep::Node(i));
        mixed.extend(after[p].iter().map(|&e| ReplayStep::Edge(e)));
    }
    vec![file, split, mixed]
}

const VALUES: [&str; 6] = ["red", "green", "blue", "", "a=b", "v1"];

fn pick_live(rng: &mut Prng, o: &NaiveStore, kind: Kind) -> Option<u64> {
    let ids = o.live_ids(kind);
    (!ids.is_empty()).then(|| ids[rng.below(ids.len() as u64) as usize])
}

fn labels(o: &NaiveStore, kind: Kind) -> Vec<String> {
    o.get_types(kind)
}

fn declared(bundle_types: &[(Kind, String, Vec<String>)], kind: Kind, label: &str) -> Vec<String> {
    bundle_types
        .iter()
        .find(|(k, l, _)| *k == kind && l == label)
        .map(|t| t.2.clone())
        .unwrap_or_default()
}

/// Applies `count` random updates to both stores and checks that each
/// one succeeds or fails on both sides and hands out the same id.
/// `types` mirrors the declared schema and is kept up to date.
pub fn mutate_both(
    d: &mut DynAttK2Graph,
    o: &mut NaiveStore,
    types: &mut Vec<(Kind, String, Vec<String>)>,
    rng: &mut Prng,
    count: usize,
) -> Result<(), String> {
    for step in 0..count {
        let roll = rng.below(100);
        let kind = if rng.chance(50) { Kind::Node } else { Kind::Edge };
        let (what, a, b) = match roll {
            0..=19 => {
                let ls = labels(o, Kind::Node);
                let label = ls[rng.below(ls.len() as u64) as usize].clone();
                let attrs = random_attrs(rng, &declared(types, Kind::Node, &label));
                ("add node", d.add_node(&label, &attrs).map(Some), o.add_node(&label, &attrs).map(Some))
            }
            20..=44 => {
                let ls = labels(o, Kind::Edge);
                let label = ls[rng.below(ls.len() as u64) as usize].clone();
                let attrs = random_attrs(rng, &declared(types, Kind::Edge, &label));
                let u = pick_live(rng, o, Kind::Node).unwrap_or(1);
                let v = pick_live(rng, o, Kind::Node).unwrap_or(1);
                (
                    "add edge",
                    d.add_edge(&label, u, v, &attrs).map(Some),
                    o.add_edge(&label, u, v, &attrs).map(Some),
                )
            }
            45..=64 => {
                let Some(id) = pick_live(rng, o, kind) else { continue };
                let label = o.get_type(kind, id).map_err(|e| e.to_string())?.to_owned();
                let atts = declared(types, kind, &label);
                let att = if atts.is_empty() || rng.chance(5) {
                    "undeclared".to_owned()
                } else {
                    atts[rng.below(atts.len() as u64) as usize].clone()
                };
                let value = VALUES[rng.below(VALUES.len() as u64) as usize];
                (
                    "set attribute",
                    d.set_attribute(kind, id, &att, value).map(|_| None),
                    o.set_attribute(kind, id, &att, value).map(|_| None),
                )
            }
            65..=84 => {
                let Some(id) = pick_live(rng, o, Kind::Edge) else { continue };
                ("remove edge", d.remove_edge(id).map(|_| None), o.remove_edge(id).map(|_| None))
            }
            85..=94 => {
                let Some(id) = pick_live(rng, o, Kind::Node) else { continue };
                ("remove node", d.remove_node(id).map(|_| None), o.remove_node(id).map(|_| None))
            }
            95..=97 => {
                let label = format!("New{:x}", rng.next_u64());
                let r = (d.add_type(kind, &label).map(|_| None), o.add_type(kind, &label).map(|_| None));
                if r.0.is_ok() {
                    types.push((kind, label, Vec::new()));
                }
                ("add type", r.0, r.1)
            }
            _ => {
                let ls = labels(o, kind);
                let label = ls[rng.below(ls.len() as u64) as usize].clone();
                let name = format!("extra{:x}", rng.next_u64());
                let dense = rng.chance(50);
                let r = (
                    d.add_attribute(kind, &label, &name, dense).map(|_| None),
                    o.add_attribute(kind, &label, &name).map(|_| None),
                );
                if r.0.is_ok() {
                    if let Some(t) = types.iter_mut().find(|t| t.0 == kind && t.1 == label) {
                        t.2.push(name);
                    }
                }
                ("add attribute", r.0, r.1)
            }
        };
        match (&a, &b) {
            (Ok(x), Ok(y)) if x == y => {}
            (Err(_), Err(_)) => {}
            _ => return Err(format!("step {step} ({what}): dynamic {a:?}, oracle {b:?}")),
        }
    }
    Ok(())
}

fn random_attrs(rng: &mut Prng, names: &[String]) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for n in names {
        if rng.chance(70) {
            out.push((n.clone(), VALUES[rng.below(VALUES.len() as u64) as usize].to_owned()));
        }
    }
    out
}

pub fn schema_of(bundle: &InputBundle) -> Vec<(Kind, String, Vec<String>)> {
    bundle
        .types
        .iter()
        .map(|t| (t.kind, t.label.clone(), t.attributes.iter().map(|a| a.name.clone()).collect()))
        .collect()
}

/// Oracle holding `bundle` with ids in file order, as the dynamic store
/// assigns them under [`DynAttK2Graph::from_bundle`].
pub fn oracle_in_file_order(bundle: &InputBundle) -> NaiveStore {
    let steps: Vec<ReplayStep> = (0..bundle.nodes.len())
        .map(ReplayStep::Node)
        .chain((0..bundle.edges.len()).map(ReplayStep::Edge))
        .collect();
    oracle_replay(bundle, &steps)
}

/// Oracle built by the same insertion sequence as
/// [`DynAttK2Graph::from_bundle_in_order`], so internal ids coincide.
pub fn oracle_replay(bundle: &InputBundle, steps: &[ReplayStep]) -> NaiveStore {
    let mut o = NaiveStore::new();
    for t in &bundle.types {
        o.add_type(t.kind, &t.label).unwrap();
        for a in &t.attributes {
            o.add_attribute(t.kind, &t.label, &a.name).unwrap();
        }
    }
    let mut ids = std::collections::HashMap::new();
    for &step in steps {
        match step {
            ReplayStep::Node(i) => {
                let n = &bundle.nodes[i];
                let id = o.add_node_ext(&n.ext_id, &n.label, &n.attrs).unwrap();
                ids.insert(n.ext_id.as_str(), id);
            }
            ReplayStep::Edge(i) => {
                let e = &bundle.edges[i];
                o.add_edge_ext(&e.ext_id, &e.label, ids[e.source.as_str()], ids[e.target.as_str()], &e.attrs)
                    .unwrap();
            }
        }
    }
    o
}
