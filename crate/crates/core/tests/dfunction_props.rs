use proptest::prelude::*;
use walkforge_core::dfunction::{d_by_enumeration, d_index, enumerate_decompositions, structural_values, DStatus};
use walkforge_core::LabelledSeq;

fn seq(max_len: usize) -> impl Strategy<Value = LabelledSeq> {
    prop::collection::vec((0u64..4, 0u64..4), 0..=max_len).prop_map(|pairs| {
        let (f0, f1) = pairs.into_iter().unzip();
        LabelledSeq::new(f0, f1).unwrap()
    })
}

/// A sequence with a planted decomposition: a unique `F₁` peak, a later `F₀`
/// peak and a later `F₁` bump, over low background values.
fn decomposable(max_len: usize) -> impl Strategy<Value = LabelledSeq> {
    (3..=max_len)
        .prop_flat_map(|n| (seq_of_len(n), 0..n - 2, 1..n - 1, 2..n))
        .prop_filter_map("increasing marks", |(s, a, b, c)| {
            (a < b && b < c).then(|| {
                let (mut f0, mut f1) = (s.f0().to_vec(), s.f1().to_vec());
                f1[a] = 9;
                f0[b] = 9;
                f1[c] = 5;
                LabelledSeq::new(f0, f1).unwrap()
            })
        })
}

fn seq_of_len(n: usize) -> impl Strategy<Value = LabelledSeq> {
    prop::collection::vec((0u64..4, 0u64..4), n).prop_map(|pairs| {
        let (f0, f1) = pairs.into_iter().unzip();
        LabelledSeq::new(f0, f1).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn index_lies_inside_the_first_block(s in seq(8)) {
        for (index, d) in enumerate_decompositions(&s) {
            let [p1, p2, ..] = d.splits;
            prop_assert!(p1 <= index && index < p2, "{index} outside [{p1}, {p2})");
            prop_assert!(index < s.len());
        }
    }

    #[test]
    fn structural_values_match_enumeration(s in seq(8)) {
        let enumerated: std::collections::BTreeSet<usize> = enumerate_decompositions(&s).into_keys().collect();
        prop_assert_eq!(structural_values(&s), enumerated);
    }

    #[test]
    fn total_index_agrees_with_enumeration_when_consistent(s in seq(8)) {
        let total = d_index(&s);
        prop_assert!(total.value < s.len().max(1));
        match d_by_enumeration(&s) {
            Ok(v) => {
                prop_assert_eq!(total.value, v);
                prop_assert!(!matches!(total.status, DStatus::Conflict(_)));
            }
            Err(_) => prop_assert!(matches!(total.status, DStatus::Conflict(_))),
        }
    }

    #[test]
    fn appending_zero_keeps_decomposition_indices(s in decomposable(9)) {
        let before = structural_values(&s);
        prop_assert!(!before.is_empty());
        let mut longer = s.clone();
        longer.push(0, 0);
        prop_assert_eq!(structural_values(&longer), before);
    }
}
