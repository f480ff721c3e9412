mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use proofmine::cluster::{kmeans, ClusterAlgorithm};
use proofmine::digest::CoOccurrence;
use proofmine::features::{extract_features_with, min_max_scale, FeatureVector, SLOTS_PER_STEP};
use proofmine::parser::{parse_library, parse_term_tree};

fn term_source() -> impl Strategy<Value = String> {
    let leaf = prop::sample::select(vec!["x", "y", "s", "0", "1", "addn", "map f", "[::]"])
        .prop_map(str::to_string);
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (
                inner.clone(),
                prop::sample::select(vec!["+", "*", "=", "->", "++", "<=", "/\\"]),
                inner.clone()
            )
                .prop_map(|(a, op, b)| format!("({a} {op} {b})")),
            (
                prop::sample::select(vec!["f", "size", "rev"]),
                inner.clone()
            )
                .prop_map(|(f, a)| format!("{f} ({a})")),
            inner.clone().prop_map(|a| format!("forall z, {a}")),
            (inner.clone(), inner).prop_map(|(a, b)| format!("[:: {a}; {b}]")),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printed_terms_parse_back(src in term_source()) {
        let t = parse_term_tree(&src).unwrap();
        let again = parse_term_tree(&t.to_string()).unwrap();
        prop_assert_eq!(again, t);
    }

    #[test]
    fn vectors_have_fixed_shape(seed in any::<u64>(), patch_len in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let src = common::random_library_source(&mut rng, "l", 6);
        let lemmas = parse_library(&src, "t").unwrap();
        let table = proofmine::features::build_encoding_table(&lemmas).unwrap();
        for l in &lemmas {
            let v = extract_features_with(l, &table, patch_len).unwrap();
            prop_assert_eq!(v.len(), patch_len * SLOTS_PER_STEP);
            for step in l.steps.len()..patch_len {
                prop_assert!(v.block(step).iter().all(|&x| x == 0.0));
            }
            prop_assert_eq!(&v, &extract_features_with(l, &table, patch_len).unwrap());
        }
    }

    #[test]
    fn scaling_lands_in_the_unit_box(rows in prop::collection::vec(prop::collection::vec(-50.0f64..50.0, 4), 1..12)) {
        let vs: Vec<FeatureVector> = rows.iter().map(|r| FeatureVector { values: r.clone() }).collect();
        let scaled = min_max_scale(&vs);
        for (s, v) in scaled.iter().zip(&vs) {
            prop_assert!(s.values.iter().all(|&x| (0.0..=1.0).contains(&x)));
            // Order along every dimension survives scaling.
            for (t, w) in scaled.iter().zip(&vs) {
                for d in 0..4 {
                    if v.values[d] < w.values[d] {
                        prop_assert!(s.values[d] <= t.values[d]);
                    }
                }
            }
        }
    }

    #[test]
    fn co_occurrence_is_symmetric(runs in prop::collection::vec(prop::collection::vec(0usize..4, 9), 1..20)) {
        let co = CoOccurrence::from_runs(9, runs.iter().map(Vec::as_slice));
        for a in 0..9 {
            prop_assert_eq!(co.get(a, a), 1.0);
            for b in 0..9 {
                prop_assert_eq!(co.count(a, b), co.count(b, a));
                prop_assert!((0.0..=1.0).contains(&co.get(a, b)));
            }
        }
        let lo = co.components(0.3);
        for hi in co.components(0.7) {
            prop_assert!(lo.iter().any(|g| hi.iter().all(|i| g.contains(i))));
        }
    }

    #[test]
    fn kmeans_never_increases_its_objective(
        pts in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 2), 2..15),
        seed in any::<u64>(),
    ) {
        let n = 1 + (seed as usize % pts.len());
        let a = kmeans(&pts, n, seed).unwrap();
        for w in a.trace.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn proximity_is_a_unit_interval(
        pts in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 3), 3..12),
        seed in any::<u64>(),
    ) {
        for alg in ClusterAlgorithm::ALL {
            let a = alg.run(&pts, 3, seed).unwrap();
            prop_assert!(a.proximity.iter().all(|p| (0.0..=1.0).contains(p)));
            prop_assert!(a.labels.iter().all(|&l| l < 3));
        }
    }
}
