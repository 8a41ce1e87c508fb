use proptest::prelude::*;

use synroute::corpus::RankedList;
use synroute::eval::{contain_match, normalize_answer, objective, tune_thresholds, PathOutcomes};
use synroute::features::{fit_standardizer, standardize};
use synroute::graph::HeteroGraph;
use synroute::retrieval::{graph_search, run_ppr};
use synroute::router::{route, weighted_rrf, RrfConfig};
use synroute::{Path, PprConfig, ResetVector, Thresholds, TuneConfig, ValidationRecord};

fn graph_strategy() -> impl Strategy<Value = (HeteroGraph, ResetVector)> {
    (2usize..12, 0usize..6).prop_flat_map(|(ne, np)| {
        let rel = prop::collection::vec((0..ne, 0..ne), 0..20);
        let occ = if np == 0 { Just(vec![]).boxed() } else { prop::collection::vec((0..ne, 0..np), 0..15).boxed() };
        let seeds = prop::collection::vec((0..ne, 0.01f64..1.0), 1..4);
        (rel, occ, seeds).prop_map(move |(rel, occ, seeds)| {
            let g = HeteroGraph::from_parts(
                (0..ne).map(|i| format!("e{i}")).collect(),
                (0..np).map(|i| format!("p{i}")).collect(),
                rel.into_iter().map(|(a, b)| (a, b, "r".to_string())),
                occ,
                [],
            )
            .unwrap();
            let total: f64 = seeds.iter().map(|(_, w)| w).sum();
            let weights = seeds.into_iter().map(|(i, w)| (i, w / total)).collect();
            (g, ResetVector { weights })
        })
    })
}

fn ranked(ids: Vec<u8>) -> RankedList {
    let mut seen = std::collections::HashSet::new();
    let ids: Vec<String> = ids.into_iter().filter(|i| seen.insert(*i)).map(|i| format!("d{i:02}")).collect();
    let n = ids.len();
    RankedList { entries: ids.into_iter().enumerate().map(|(i, id)| (id, (n - i) as f64)).collect() }
}

fn record() -> impl Strategy<Value = ValidationRecord> {
    (0.0f64..=1.0, any::<[bool; 3]>(), [0.1f64..5.0, 0.1f64..5.0, 0.1f64..5.0]).prop_map(|(s, c, l)| ValidationRecord {
        s,
        correct: PathOutcomes { dense: c[0], graph: c[1], fusion: c[2] },
        latency_ms: PathOutcomes { dense: l[0], graph: l[1], fusion: l[2] },
    })
}

proptest! {
    #[test]
    fn ppr_is_a_distribution((g, r0) in graph_strategy()) {
        let r = run_ppr(&g, &r0, &PprConfig::default()).unwrap();
        prop_assert!(r.iter().all(|&v| v >= 0.0));
        prop_assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-8);
        let list = graph_search(&g, &r, 5);
        prop_assert_eq!(list.len(), g.num_passages().min(5));
        for w in list.entries.windows(2) {
            prop_assert!(w[0].1 > w[1].1 || (w[0].1 == w[1].1 && w[0].0 < w[1].0));
        }
    }

    #[test]
    fn routing_regions_are_ordered(s in 0.0f64..=1.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        prop_assume!(a != b);
        let t = Thresholds::new(a.min(b), a.max(b)).unwrap();
        let p = route(s, &t).unwrap().path;
        prop_assert_eq!(p == Path::Graph, s >= t.tau_high);
        prop_assert_eq!(p == Path::Dense, s <= t.tau_low);
    }

    #[test]
    fn rrf_is_symmetric_in_its_lists(a in prop::collection::vec(0u8..30, 0..10),
                                     b in prop::collection::vec(0u8..30, 0..10),
                                     s in 0.0f64..=1.0) {
        let cfg = RrfConfig::default();
        let (ra, rb) = (ranked(a), ranked(b));
        let ab = weighted_rrf(&ra, &rb, s, &cfg, 100);
        let ba = weighted_rrf(&rb, &ra, 1.0 - s, &cfg, 100);
        prop_assert_eq!(ab.ids().collect::<Vec<_>>(), ba.ids().collect::<Vec<_>>());
        for ((_, x), (_, y)) in ab.entries.iter().zip(&ba.entries) {
            prop_assert!((x - y).abs() < 1e-15);
        }
        let mut union: Vec<&str> = ra.ids().chain(rb.ids()).collect();
        union.sort();
        union.dedup();
        prop_assert_eq!(ab.len(), union.len());
    }

    #[test]
    fn top_k_agrees_with_full_sort(scores in prop::collection::vec(-3i8..3, 0..40), k in 0usize..45) {
        let ids: Vec<String> = (0..scores.len()).map(|i| format!("p{:03}", (i * 7) % 41)).collect();
        let vals: Vec<f64> = scores.iter().map(|&v| v as f64 / 2.0).collect();
        let a = RankedList::top_k(&ids, &vals, k);
        let b = RankedList::from_scored(ids.iter().cloned().zip(vals.iter().copied()).collect(), k);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn standardized_columns_are_centered(rows in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 4), 2..30)) {
        let (mu, sigma) = fit_standardizer(&rows).unwrap();
        let z: Vec<Vec<f64>> = rows.iter().map(|r| standardize(r, &mu, &sigma).unwrap()).collect();
        let n = z.len() as f64;
        for j in 0..4 {
            let m = z.iter().map(|r| r[j]).sum::<f64>() / n;
            prop_assert!(m.abs() < 1e-9);
        }
    }

    #[test]
    fn contain_match_ignores_case_and_spacing(words in prop::collection::vec("[a-zA-Z0-9]{1,6}", 1..5)) {
        let gold = words.join(" ");
        let noisy = format!("  x\t{}  y ", words.iter().map(|w| w.to_uppercase()).collect::<Vec<_>>().join("\n  "));
        prop_assert!(contain_match(&noisy, std::slice::from_ref(&gold)));
        prop_assert_eq!(normalize_answer(&normalize_answer(&noisy)), normalize_answer(&noisy));
    }

    #[test]
    fn tuned_objective_is_a_maximum(recs in prop::collection::vec(record(), 1..25)) {
        let cfg = TuneConfig::default();
        let (best, j) = tune_thresholds(&recs, &cfg).unwrap();
        prop_assert_eq!(objective(&recs, &best, cfg.lambda_latency).unwrap(), j);
        for t in [Thresholds::default(), Thresholds::new(0.0, 1.0).unwrap(), Thresholds::new(0.5, 0.55).unwrap()] {
            prop_assert!(objective(&recs, &t, cfg.lambda_latency).unwrap() <= j);
        }
    }
}
