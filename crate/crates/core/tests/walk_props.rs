use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use walkforge_core::walks::lemmas::check_walk;
use walkforge_core::{walk, CanonicalLadder, FiniteSuccessor, Ordinal, TableCSequence};

fn ordinal_pair() -> impl Strategy<Value = (Ordinal, Ordinal)> {
    let ord = prop::collection::vec(0u64..4, 4).prop_map(|coeffs| {
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (Ordinal::from_nat(3 - i as u64), c))
            .collect();
        Ordinal::from_terms(terms).unwrap()
    });
    (ord.clone(), ord).prop_filter_map("0 < α < β", |(a, b)| {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        (!lo.is_zero() && lo < hi).then_some((hi, lo))
    })
}

proptest! {
    #[test]
    fn finite_successor_walk_counts_down(n in 2usize..64, a in 1usize..64, b in 1usize..64) {
        let (alpha, beta) = (a.min(b) % n, a.max(b) % n);
        prop_assume!(alpha > 0 && alpha <= beta);
        let t = walk(&FiniteSuccessor::new(n), &beta, &alpha).unwrap();
        prop_assert_eq!(t.steps().to_vec(), (alpha..=beta).rev().collect::<Vec<_>>());
    }

    #[test]
    fn ladder_walks_descend_and_satisfy_lemmas((beta, alpha) in ordinal_pair()) {
        let cs = CanonicalLadder::new(None);
        let t = walk(&cs, &beta, &alpha).unwrap();
        prop_assert_eq!(t.steps().first(), Some(&beta));
        prop_assert_eq!(t.steps().last(), Some(&alpha));
        prop_assert!(t.steps().windows(2).all(|w| w[0] > w[1]));
        let violations = check_walk(&cs, Ordinal::clone, &beta, &alpha);
        prop_assert!(violations.is_empty(), "{:?}", violations);
    }

    #[test]
    fn random_table_walks_satisfy_lemmas(seed in any::<u64>(), density in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cs = TableCSequence::random(12, density, &mut rng);
        for beta in 1..12usize {
            for alpha in 1..beta {
                let v = check_walk(&cs, |x: &usize| *x % 3, &beta, &alpha);
                prop_assert!(v.is_empty(), "{:?}", v);
            }
        }
    }
}
