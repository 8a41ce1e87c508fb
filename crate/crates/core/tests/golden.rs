use std::collections::BTreeMap;
use std::path::PathBuf;

use synroute::corpus::load_queries;
use synroute::features::units::{count_units, ratio_features, RATIO_NAMES};
use synroute::features::UnitCounts;
use synroute::parse::{load_parses, write_parses};
use synroute::{EntityType, Error};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn golden_units() -> BTreeMap<String, UnitCounts> {
    serde_json::from_str(&std::fs::read_to_string(fixture("golden_units.json")).unwrap()).unwrap()
}

/// Ratios written out longhand from the counts.
fn expected_ratios(u: &UnitCounts) -> [f64; 14] {
    let d = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    [
        d(u.w, u.s),
        d(u.w, u.t),
        d(u.w, u.c),
        d(u.c, u.s),
        d(u.c, u.t),
        d(u.ct, u.t),
        d(u.dc, u.c),
        d(u.dc, u.t),
        d(u.cp, u.c),
        d(u.cp, u.t),
        d(u.t, u.s),
        d(u.cn, u.c),
        d(u.cn, u.t),
        d(u.vp, u.t),
    ]
}

#[test]
fn unit_counts_match_hand_counts() {
    let golden = golden_units();
    assert_eq!(golden.len(), 10);
    let recs = load_parses(fixture("parses.jsonl")).unwrap();
    for (id, want) in &golden {
        let rec = recs.iter().find(|r| &r.id == id).unwrap();
        let pq = rec.to_parsed().unwrap();
        let got = count_units(&pq.con).unwrap();
        assert_eq!(&got, want, "{id}");
        let ratios = ratio_features(&got);
        for ((name, v), (want_name, e)) in ratios.iter().zip(RATIO_NAMES.iter().zip(expected_ratios(want))) {
            assert_eq!(name, want_name);
            assert_eq!(*v, e, "{id} {name}");
        }
    }
}

#[test]
fn sidecar_file_round_trips() {
    let recs = load_parses(fixture("parses.jsonl")).unwrap();
    let queries = load_queries(fixture("queries.jsonl")).unwrap();
    assert_eq!(recs.len(), queries.len());
    for (r, q) in recs.iter().zip(&queries) {
        assert_eq!(r.id, q.id);
    }

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("parses.jsonl");
    write_parses(&out, &recs).unwrap();
    assert_eq!(load_parses(&out).unwrap(), recs);

    let two = recs.iter().find(|r| r.id == "g10").unwrap().to_parsed().unwrap();
    assert_eq!(two.dep.len(), 2);
    assert_eq!(two.con.children.len(), 2);
    assert_eq!(two.word_count(), 6);

    let ents = recs.iter().find(|r| r.id == "g03").unwrap().to_parsed().unwrap().entities;
    assert_eq!(ents.len(), 2);
    assert!(ents.iter().all(|e| e.etype == EntityType::Person));

    let dogs = recs.iter().find(|r| r.id == "p01").unwrap().to_parsed().unwrap();
    assert_eq!(dogs.dep[0].tokens().iter().filter(|t| !t.is_punct()).count(), 2);

    let failed = recs.iter().find(|r| r.id == "e01").unwrap();
    assert!(matches!(failed.to_parsed(), Err(Error::MissingParse(m)) if m.contains("empty question")));
}

#[test]
fn missing_sidecar_file_is_reported() {
    assert!(matches!(load_parses(fixture("absent.jsonl")), Err(Error::MissingFile(_))));
}
