mod common;

use attk2::cli::Prng;
use attk2::dyngraph::DynAttK2Graph;
use attk2::io::load_input;
use attk2::oracle::NaiveStore;
use attk2::{AttK2Graph, GraphQueries, Kind};

use common::{all_queries, disagreement, fixture_dir, gen_bundle, mutate_both, oracle_in_file_order, replay_orders, schema_of};

#[test]
fn every_replay_order_matches_the_static_store() {
    let bundle = gen_bundle(250, 1200, 21);
    let g = AttK2Graph::build(&bundle, 2).unwrap();
    let queries = all_queries(&bundle, 21, 150);
    for (i, order) in replay_orders(&bundle, 21).iter().enumerate() {
        let d = DynAttK2Graph::from_bundle_in_order(&bundle, order, 2).unwrap();
        if let Some(msg) = disagreement(&g, &d, &queries) {
            panic!("order {i}: {msg}");
        }
    }
}

#[test]
fn updates_match_the_oracle() {
    for seed in [3, 4] {
        let bundle = gen_bundle(120, 500, seed);
        let mut d = DynAttK2Graph::from_bundle(&bundle, 2).unwrap();
        let mut o = oracle_in_file_order(&bundle);
        let mut types = schema_of(&bundle);
        let mut rng = Prng::new(seed);
        for round in 0..4 {
            mutate_both(&mut d, &mut o, &mut types, &mut rng, 150).unwrap();
            let live = d.export_bundle().unwrap();
            let queries = all_queries(&live, seed + round, 60);
            if let Some(msg) = disagreement(&d, &o, &queries) {
                panic!("seed {seed} round {round}: {msg}");
            }
            for u in o.live_ids(Kind::Node).into_iter().take(40) {
                for v in o.live_ids(Kind::Node).into_iter().take(40) {
                    assert_eq!(d.edges_between(u, v).unwrap(), o.edges_between(u, v).unwrap());
                }
            }
        }
    }
}

#[test]
fn freeze_matches_the_dynamic_store() {
    let bundle = gen_bundle(150, 700, 8);
    let mut d = DynAttK2Graph::from_bundle(&bundle, 2).unwrap();
    let mut o = oracle_in_file_order(&bundle);
    let mut types = schema_of(&bundle);
    mutate_both(&mut d, &mut o, &mut types, &mut Prng::new(8), 300).unwrap();
    let frozen = d.freeze().unwrap();
    let live = d.export_bundle().unwrap();
    // Types without live elements are dropped on freeze.
    let queries: Vec<_> = all_queries(&live, 8, 120)
        .into_iter()
        .filter(|q| !matches!(q, attk2::cli::Query::GetTypes(_)))
        .collect();
    assert_eq!(disagreement(&frozen, &d, &queries), None);
    for kind in [Kind::Node, Kind::Edge] {
        let kept = frozen.get_types(kind);
        let all = d.get_types(kind);
        assert!(kept.iter().all(|t| all.contains(t)));
        for t in all.iter().filter(|t| !kept.contains(t)) {
            assert!(d.scan(kind, t).unwrap().is_empty(), "{t} dropped with live elements");
        }
    }
}

#[test]
fn removals_leave_no_trace() {
    let bundle = load_input(&fixture_dir()).unwrap();
    let mut d = DynAttK2Graph::from_bundle(&bundle, 2).unwrap();
    assert!(d.remove_node(4).is_err());
    for e in [4, 5, 7] {
        d.remove_edge(e).unwrap();
    }
    assert!(d.remove_edge(4).is_err());
    d.remove_node(4).unwrap();
    assert!(d.get_type(Kind::Node, 4).is_err());
    assert!(d.neighbors("Researcher", 4).is_err());
    assert_eq!(d.scan(Kind::Node, "Researcher").unwrap(), [3, 5]);
    assert_eq!(d.scan(Kind::Edge, "Reviewer").unwrap(), [6]);
    assert_eq!(
        d.select(Kind::Node, "Researcher", "Position", "Chair").unwrap(),
        attk2::Selection::Ids(vec![])
    );
    let id = d.add_node("Researcher", &[]).unwrap();
    assert_eq!(id, 6);
}

#[test]
fn oracle_orders_agree() {
    let bundle = gen_bundle(60, 200, 2);
    let sorted = NaiveStore::from_bundle_sorted(&bundle);
    let file = oracle_in_file_order(&bundle);
    assert_eq!(disagreement(&sorted, &file, &all_queries(&bundle, 2, 80)), None);
}
