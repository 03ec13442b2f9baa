use std::sync::Arc;

use proptest::prelude::*;

use fta_core::randgen::{generate_indexed, GenConfig, Seed};
use fta_core::{Fta, RankedAlphabet, State, StateSet, Transition};
use fta_lab::io::{format_fta, parse_fta};

fn random_model() -> impl Strategy<Value = Fta> {
    (
        1usize..9,
        any::<bool>(),
        0.0f64..=1.0,
        0.0f64..=1.0,
        0.0f64..=1.0,
        any::<u64>(),
    )
        .prop_map(|(n, b, d2, d0, fp, seed)| {
            let alphabet = if b {
                RankedAlphabet::setting_b()
            } else {
                RankedAlphabet::setting_a()
            };
            let config = GenConfig::new(n, Arc::new(alphabet), d2)
                .with_d0(d0)
                .with_final_prob(fp);
            generate_indexed(&config, Seed(seed), 0).unwrap()
        })
}

fn mixed_ranks() -> impl Strategy<Value = Fta> {
    let alphabet = Arc::new(
        RankedAlphabet::new([("a", 0), ("ζ", 0), ("g", 1), ("f", 2), ("h_3", 3)]).unwrap(),
    );
    let states = prop::collection::btree_set(0u32..40, 1..7);
    states
        .prop_flat_map(move |qs| {
            let qs: Vec<u32> = qs.into_iter().collect();
            let pick = prop::sample::select(qs.clone());
            let rule = (
                0usize..5,
                prop::collection::vec(pick.clone(), 3),
                pick.clone(),
            );
            (
                Just(qs.clone()),
                prop::sample::subsequence(qs.clone(), 0..=qs.len()),
                prop::collection::vec(rule, 0..25),
                Just(alphabet.clone()),
            )
        })
        .prop_map(|(qs, finals, rules, alphabet)| {
            let mut transitions: Vec<Transition> = rules
                .into_iter()
                .map(|(s, args, target)| {
                    let symbol = alphabet.symbols().nth(s).unwrap();
                    Transition::new(symbol, &args[..alphabet.rank(symbol)], target)
                })
                .collect();
            transitions.sort_unstable();
            transitions.dedup();
            let states: StateSet = qs.into_iter().map(State).collect();
            let finals: StateSet = finals.into_iter().map(State).collect();
            Fta::new(alphabet, states, finals, transitions).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn random_automata_round_trip(m in random_model()) {
        let text = format_fta(&m);
        prop_assert_eq!(&parse_fta(&text).unwrap(), &m);
        prop_assert_eq!(format_fta(&parse_fta(&text).unwrap()), text);
    }

    #[test]
    fn arbitrary_ranks_and_state_names_round_trip(m in mixed_ranks()) {
        let text = format_fta(&m);
        prop_assert_eq!(parse_fta(&text).unwrap(), m);
    }
}
