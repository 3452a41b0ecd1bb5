mod common;

use attk2::cli::Prng;
use attk2::io::{from_bytes, load_db, load_input, save_db, section_lengths, to_bytes, MAGIC};
use attk2::{AttK2Graph, Error};

use common::{all_queries, disagreement, fixture_dir, gen_bundle};

fn corrupt(bytes: &[u8]) -> bool {
    matches!(from_bytes(bytes), Err(Error::Corrupt(_)))
}

#[test]
fn round_trip_is_byte_identical() {
    for (bundle, k) in [
        (load_input(&fixture_dir()).unwrap(), 2),
        (gen_bundle(400, 2000, 17), 2),
        (gen_bundle(400, 2000, 18), 4),
        (gen_bundle(1, 0, 1), 3),
    ] {
        let g = AttK2Graph::build(&bundle, k).unwrap();
        let bytes = to_bytes(&g);
        let back = from_bytes(&bytes).unwrap();
        assert_eq!(to_bytes(&back), bytes);
        assert_eq!(disagreement(&g, &back, &all_queries(&bundle, 3, 80)), None);
        assert_eq!(section_lengths(&bytes).unwrap().len(), 6);
    }
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.db");
    let g = AttK2Graph::build(&load_input(&fixture_dir()).unwrap(), 2).unwrap();
    save_db(&g, &path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(&bytes[..8], MAGIC);
    assert_eq!(to_bytes(&load_db(&path).unwrap()), bytes);
    assert!(matches!(load_db(&dir.path().join("missing.db")), Err(Error::Io(_))));
}

#[test]
fn damaged_headers_are_rejected() {
    let g = AttK2Graph::build(&load_input(&fixture_dir()).unwrap(), 2).unwrap();
    let bytes = to_bytes(&g);
    for i in 0..8 {
        let mut b = bytes.clone();
        b[i] ^= 0x20;
        assert!(corrupt(&b), "magic byte {i}");
    }
    let mut b = bytes.clone();
    b[8] = 2;
    assert!(corrupt(&b), "version");
    let mut b = bytes.clone();
    b[12] = 5;
    assert!(corrupt(&b), "section count");
    assert!(corrupt(&[]));
    assert!(corrupt(b"ATTK2TRE"));
}

#[test]
fn truncation_is_rejected() {
    let g = AttK2Graph::build(&gen_bundle(50, 200, 4), 2).unwrap();
    let bytes = to_bytes(&g);
    for cut in (0..bytes.len()).step_by(7).chain([bytes.len() - 1]) {
        assert!(corrupt(&bytes[..cut]), "cut at {cut}");
    }
    let mut longer = bytes.clone();
    longer.push(0);
    // Trailing bytes outside every section are tolerated.
    assert!(from_bytes(&longer).is_ok());
}

#[test]
fn random_damage_never_panics() {
    let g = AttK2Graph::build(&gen_bundle(60, 250, 5), 2).unwrap();
    let bytes = to_bytes(&g);
    let mut rng = Prng::new(99);
    let mut rejected = 0;
    for _ in 0..1000 {
        let mut b = bytes.clone();
        for _ in 0..1 + rng.below(4) {
            let i = rng.below(b.len() as u64) as usize;
            b[i] ^= 1 << rng.below(8);
        }
        match from_bytes(&b) {
            Err(Error::Corrupt(_)) => rejected += 1,
            Err(e) => panic!("unexpected error kind: {e}"),
            Ok(g) => {
                // Damage inside a value can decode; the result must still be usable.
                let _ = to_bytes(&g);
            }
        }
    }
    assert!(rejected > 0);
}
