//! Cross-module property tests: serialization round-trips, closure laws,
//! candidate monotonicity, and enumeration identities.

mod common;

use critset::{
    candidates, count_completions, enumerate_shapes, forcing_closure, is_uniquely_completable,
    Entry, PartialLatinSquare, DEFAULT_NODE_BUDGET,
};
use proptest::prelude::*;

/// Raw entry triples; insertion keeps whichever prefix stays conflict-free,
/// so every generated value is a valid partial square of the order.
fn arb_pls(max_order: usize) -> impl Strategy<Value = PartialLatinSquare> {
    (1..=max_order, any::<u64>(), 0usize..40)
        .prop_map(|(order, seed, attempts)| common::random_valid_pls(order, attempts, seed))
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        ..ProptestConfig::default()
    })]

    #[test]
    fn text_round_trip_is_identity(pls in arb_pls(7)) {
        let text = pls.to_text();
        let back = PartialLatinSquare::parse_text(&text).unwrap();
        prop_assert_eq!(&back, &pls);
        prop_assert_eq!(back.to_text(), text);
    }

    #[test]
    fn builder_output_always_audits(pls in arb_pls(7)) {
        prop_assert!(pls.audit());
        let entries: Vec<Entry> = pls.entries().collect();
        prop_assert!(PartialLatinSquare::is_valid_entry_set(pls.order(), &entries));
        prop_assert_eq!(pls.shape().len(), pls.len());
    }

    #[test]
    fn candidates_shrink_under_insertion(pls in arb_pls(5), seed in any::<u64>()) {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = pls.order() as u8;
        let extra = Entry::new(
            rng.random_range(1..=n),
            rng.random_range(1..=n),
            rng.random_range(1..=n),
        );
        if let Ok(bigger) = pls.with_entry(extra) {
            for r in 1..=n {
                for c in 1..=n {
                    if bigger.is_filled(r, c) {
                        continue;
                    }
                    let before = candidates(&pls, r, c).unwrap().mask();
                    let after = candidates(&bigger, r, c).unwrap().mask();
                    prop_assert_eq!(after & !before, 0, "cell ({}, {})", r, c);
                }
            }
        }
    }

    #[test]
    fn closure_laws(pls in arb_pls(5)) {
        let once = forcing_closure(&pls);
        // extensive
        for e in pls.entries() {
            prop_assert_eq!(once.square.get(e.row, e.col), Some(e.symbol));
        }
        if !once.contradictory {
            // idempotent on non-contradictory closures
            let twice = forcing_closure(&once.square);
            prop_assert_eq!(&twice.square, &once.square);
            prop_assert!(!twice.contradictory);
            // counting commutes with closure
            prop_assert_eq!(
                count_completions(&pls, 1_000_000).count,
                count_completions(&once.square, 1_000_000).count
            );
        } else {
            // a contradictory closure certifies there is no completion
            prop_assert_eq!(count_completions(&pls, 2).count, 0);
        }
    }

    #[test]
    fn unique_completion_contains_input(pls in arb_pls(5)) {
        if let Some(square) = is_uniquely_completable(&pls) {
            prop_assert!(pls.is_contained_in(&square).unwrap());
            prop_assert_eq!(count_completions(&pls, 2).count, 1);
        }
    }

    #[test]
    fn shape_streams_have_binomial_length(n in 1usize..=3, k in 0usize..=9) {
        let k = k.min(n * n);
        let shapes: Vec<_> = enumerate_shapes(n, k, DEFAULT_NODE_BUDGET)
            .unwrap()
            .collect();
        let expected = critset::binomial_big((n * n) as u64, k as u64);
        prop_assert_eq!(num_bigint::BigUint::from(shapes.len() as u64), expected);
        // all distinct, all of size k
        for w in shapes.windows(2) {
            prop_assert!(w[0].cells() < w[1].cells(), "lexicographic order");
        }
        for s in &shapes {
            prop_assert_eq!(s.len(), k);
        }
    }
}

// Transposing and relabeling symbols are size-preserving bijections on
// valid partial squares, so the per-size counts are unchanged when the
// census is taken over the transformed family instead.
#[test]
fn census_counts_are_symmetric_under_transpose_and_relabel() {
    for n in 2..=3usize {
        let plain = common::brute_force_census(n);

        let mut transposed = vec![0u64; n * n + 1];
        let mut relabeled = vec![0u64; n * n + 1];
        common::for_each_valid_assignment(n, &mut |cells| {
            let t: Vec<u8> = (0..n * n).map(|i| cells[(i % n) * n + i / n]).collect();
            let size = t.iter().filter(|&&s| s != 0).count();
            assert!(
                common::is_valid_assignment(n, &t),
                "transpose must preserve validity"
            );
            transposed[size] += 1;

            let rl: Vec<u8> = cells
                .iter()
                .map(|&s| if s == 0 { 0 } else { (s % n as u8) + 1 })
                .collect();
            assert!(
                common::is_valid_assignment(n, &rl),
                "relabeling must preserve validity"
            );
            relabeled[size] += 1;
        });

        assert_eq!(plain, transposed, "n={n} transpose");
        assert_eq!(plain, relabeled, "n={n} relabel");
    }
}

// The library counter against the raw product-enumeration oracle.
#[test]
fn census_counts_match_brute_force_oracle() {
    for n in 1..=3usize {
        let direct: Vec<u64> = (0..=n * n)
            .map(|k| {
                critset::count_pls_by_size(n, k, DEFAULT_NODE_BUDGET)
                    .unwrap()
                    .to_u64_digits()
                    .first()
                    .copied()
                    .unwrap_or(0)
            })
            .collect();
        let oracle = common::brute_force_census(n);
        assert_eq!(direct, oracle, "n={n}");
    }
}
