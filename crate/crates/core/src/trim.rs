//! Reachability, co-reachability and trimness.
//!
//! A state is reachable when some ground tree evaluates to it, and
//! co-reachable when some context (a tree with one hole) carries it into a
//! final state. Contexts are built from transitions whose other arguments
//! are filled with reachable states only; an unreachable sibling can never
//! be produced by a ground tree.

use crate::fta::{Fta, Transition};
use crate::stateset::StateSet;

/// Least fixpoint seeded by the nullary transitions.
pub fn reachable(fta: &Fta) -> StateSet {
    reachable_in(fta.transitions())
}

/// States co-reachable from `from` (normally `fta.finals()`).
pub fn coreachable(fta: &Fta, from: &StateSet) -> StateSet {
    coreachable_in(fta.transitions(), from, &reachable(fta))
}

/// Every state is both reachable and co-reachable from the finals.
pub fn is_trim(fta: &Fta) -> bool {
    is_trim_parts(fta.states(), fta.finals(), fta.transitions())
}

/// Reachable and co-reachable states.
pub fn useful(fta: &Fta) -> StateSet {
    let reach = reachable(fta);
    coreachable_in(fta.transitions(), fta.finals(), &reach).intersection(&reach)
}

/// The restriction of `fta` to its useful states.
pub fn trim(fta: &Fta) -> Fta {
    fta.restrict(&useful(fta))
}

pub(crate) fn is_trim_parts(
    states: &StateSet,
    finals: &StateSet,
    transitions: &[Transition],
) -> bool {
    let reach = reachable_in(transitions);
    if reach != *states {
        return false;
    }
    coreachable_in(transitions, finals, &reach) == *states
}

pub(crate) fn reachable_in(transitions: &[Transition]) -> StateSet {
    let mut reach = StateSet::new();
    let mut changed = true;
    while changed {
        changed = false;
        for t in transitions {
            if !reach.contains(t.target) && t.args.iter().all(|&q| reach.contains(q)) {
                reach.insert(t.target);
                changed = true;
            }
        }
    }
    reach
}

pub(crate) fn coreachable_in(
    transitions: &[Transition],
    from: &StateSet,
    reach: &StateSet,
) -> StateSet {
    let mut co = from.clone();
    let mut changed = true;
    while changed {
        changed = false;
        for t in transitions {
            if !co.contains(t.target) {
                continue;
            }
            for (i, &q) in t.args.iter().enumerate() {
                if co.contains(q) {
                    continue;
                }
                let siblings_ok = t
                    .args
                    .iter()
                    .enumerate()
                    .all(|(j, &p)| j == i || reach.contains(p));
                if siblings_ok {
                    co.insert(q);
                    changed = true;
                }
            }
        }
    }
    co
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::m_ex;
    use crate::{language_fingerprint, states, RankedAlphabet, Transition};
    use alloc::sync::Arc;

    fn fta(states: StateSet, finals: StateSet, ts: &[(&str, &[u32], u32)]) -> Fta {
        let a = Arc::new(RankedAlphabet::setting_a());
        let ts = ts
            .iter()
            .map(|(s, args, q)| Transition::new(a.lookup(s).unwrap(), args, *q))
            .collect();
        Fta::new(a, states, finals, ts).unwrap()
    }

    #[test]
    fn example_is_trim() {
        let m = m_ex();
        assert_eq!(reachable(&m), states![0, 1, 2, 3]);
        assert_eq!(coreachable(&m, m.finals()), states![0, 1, 2, 3]);
        assert!(is_trim(&m));
    }

    #[test]
    fn no_nullary_nothing_reachable() {
        let m = fta(states![1], states![1], &[("sigma", &[1, 1], 1)]);
        assert_eq!(reachable(&m), states![]);
        assert!(!is_trim(&m));
    }

    #[test]
    fn isolated_state_unreachable() {
        let m = fta(states![1, 2], states![1], &[("alpha", &[], 1)]);
        assert_eq!(reachable(&m), states![1]);
    }

    #[test]
    fn coreachability() {
        let m = fta(
            states![1, 2, 3],
            states![3],
            &[("alpha", &[], 1), ("alpha", &[], 2), ("sigma", &[1, 1], 3)],
        );
        assert_eq!(coreachable(&m, m.finals()), states![1, 3]);
        let none = fta(
            states![1, 2],
            states![],
            &[("alpha", &[], 1), ("sigma", &[1, 1], 2)],
        );
        assert_eq!(coreachable(&none, none.finals()), states![]);
        assert!(!is_trim(&none));
    }

    #[test]
    fn reachable_but_not_coreachable() {
        let m = fta(
            states![1, 2],
            states![1],
            &[("alpha", &[], 1), ("sigma", &[1, 1], 2)],
        );
        assert_eq!(reachable(&m), states![1, 2]);
        assert!(!is_trim(&m));
    }

    #[test]
    fn unreachable_sibling_blocks_context() {
        // σ(1, 2) → 3 with 2 unreachable: no context lifts 1 into 3.
        let m = fta(
            states![1, 2, 3],
            states![3],
            &[("alpha", &[], 1), ("sigma", &[1, 2], 3)],
        );
        assert_eq!(coreachable(&m, m.finals()), states![2, 3]);
        assert_eq!(reachable(&m), states![1]);
        assert_eq!(useful(&m), states![]);
        assert!(!is_trim(&m));
    }

    #[test]
    fn trimming_preserves_language() {
        let m = fta(
            states![1, 2, 3, 4],
            states![3],
            &[
                ("alpha", &[], 1),
                ("alpha", &[], 4),
                ("sigma", &[1, 1], 3),
                ("sigma", &[1, 2], 3),
                ("sigma", &[4, 4], 4),
            ],
        );
        let t = trim(&m);
        assert_eq!(t.states(), &states![1, 3]);
        assert!(is_trim(&t));
        assert_eq!(
            language_fingerprint(&m, 3).unwrap(),
            language_fingerprint(&t, 3).unwrap()
        );
    }
}
