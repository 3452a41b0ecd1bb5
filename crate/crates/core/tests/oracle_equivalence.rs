mod common;

use attk2::io::load_input;
use attk2::oracle::NaiveStore;
use attk2::{AttK2Graph, GraphQueries, Kind};

use common::{all_queries, disagreement, fixture_dir, gen_bundle};

#[test]
fn generated_graphs_agree_with_oracle() {
    for seed in 1..=3 {
        let bundle = gen_bundle(300, 1500, seed);
        let g = AttK2Graph::build(&bundle, 2).unwrap();
        let o = NaiveStore::from_bundle_sorted(&bundle);
        let queries = all_queries(&bundle, seed, 150);
        if let Some(msg) = disagreement(&g, &o, &queries) {
            panic!("seed {seed}: {msg}");
        }
        for u in 1..=g.node_count() {
            for v in [1, u, g.node_count() + 1 - u] {
                assert_eq!(g.edges_between(u, v).unwrap(), o.edges_between(u, v).unwrap());
            }
        }
    }
}

#[test]
fn larger_k_gives_same_answers() {
    let bundle = gen_bundle(200, 900, 9);
    let a = AttK2Graph::build(&bundle, 2).unwrap();
    let b = AttK2Graph::build(&bundle, 4).unwrap();
    let queries = all_queries(&bundle, 9, 100);
    assert_eq!(disagreement(&a, &b, &queries), None);
}

#[test]
fn running_example_agrees_with_oracle() {
    let bundle = load_input(&fixture_dir()).unwrap();
    let g = AttK2Graph::build(&bundle, 2).unwrap();
    let o = NaiveStore::from_bundle_sorted(&bundle);
    assert_eq!(disagreement(&g, &o, &all_queries(&bundle, 1, 200)), None);
    for id in 1..=5 {
        for label in ["Paper", "Researcher"] {
            assert_eq!(g.neighbors(label, id).unwrap(), o.neighbors(label, id).unwrap());
        }
        for label in ["Author", "Colleague", "PhDDirector", "Reviewer"] {
            assert_eq!(g.related(label, id).unwrap(), o.related(label, id).unwrap());
        }
    }
}

#[test]
fn tiny_and_degenerate_graphs() {
    for (n, m) in [(1, 0), (1, 5), (5, 7), (3, 30)] {
        let bundle = gen_bundle(n, m, n * 31 + m);
        let g = AttK2Graph::build(&bundle, 2).unwrap();
        let o = NaiveStore::from_bundle_sorted(&bundle);
        assert_eq!(disagreement(&g, &o, &all_queries(&bundle, 5, 50)), None, "{n} nodes {m} edges");
        assert_eq!(g.edge_count(), m);
        assert!(g.scan(Kind::Node, "N0").unwrap().len() as u64 <= n);
    }
}
