use proptest::prelude::*;
use walkforge_core::colouring::{colour_table, Which};
use walkforge_core::{ColourTable, ColouringSystem, FiniteSuccessor, Generator};

fn system() -> impl Strategy<Value = ColouringSystem> {
    (2u64..5, 2u64..6, 0u64..3).prop_map(|(k0, k1, shift)| {
        let text = format!(
            r#"{{"schema":"walkforge/1","kind":"colouring-system","kappa0":{k0},"kappa1":{k1},"kappa2":24,
            "h":"identity","f0":"mod:{k0}","f1":"mod:{k1}","f2":"identity","hprime":"identity",
            "h1":"mod:{k1}","h2":"mod:{}"}}"#,
            shift + 1
        );
        ColouringSystem::from_json(&text).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn tables_are_deterministic_and_round_trip(sys in system(), which in prop_oneof![Just(Which::C1), Just(Which::C2)]) {
        let cs = FiniteSuccessor::new(24);
        let a = colour_table(&sys, &cs, 24, which).unwrap();
        let b = colour_table(&sys, &cs, 24, which).unwrap();
        prop_assert_eq!(a.to_json(), b.to_json());
        let back = ColourTable::from_json(&a.to_json()).unwrap();
        prop_assert_eq!(back, a.clone());
        for x in 0..24 {
            for y in 0..24 {
                if x != y {
                    prop_assert_eq!(a.get(x, y), a.get(y, x));
                }
            }
        }
    }

    #[test]
    fn generator_text_round_trips(k in 1u64..50) {
        for g in [Generator::Identity, Generator::Mod(k), Generator::Const(k)] {
            let text = serde_json::to_string(&g).unwrap();
            let back: Generator = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back, g);
        }
    }
}
