//! Bounded enumeration of ground trees and finite language fingerprints.
//!
//! The number of trees of height at most `h` grows doubly exponentially
//! (1, 2, 5, 26, 677, 458330 over `{alpha/0, sigma/2}`), so the height is
//! capped at [`MAX_HEIGHT`] and the total count at [`MAX_TREES`].

use alloc::collections::BTreeSet;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::alphabet::RankedAlphabet;
use crate::tree::Tree;
use crate::Error;

pub const MAX_HEIGHT: usize = 5;
pub const MAX_TREES: usize = 2_000_000;

/// Anything that decides membership of ground trees.
pub trait TreeAcceptor {
    fn alphabet(&self) -> &RankedAlphabet;
    fn accepts(&self, tree: &Tree) -> Result<bool, Error>;
}

impl TreeAcceptor for crate::Fta {
    fn alphabet(&self) -> &RankedAlphabet {
        crate::Fta::alphabet(self)
    }
    fn accepts(&self, tree: &Tree) -> Result<bool, Error> {
        crate::Fta::accepts(self, tree)
    }
}

/// All ground trees of height at most `max_height`.
///
/// Trees come grouped by height; within one height the order is that of an
/// odometer over (symbol, children). The output for `h` is a prefix of the
/// output for `h + 1`.
pub fn enumerate_trees(alphabet: &RankedAlphabet, max_height: usize) -> Result<Vec<Tree>, Error> {
    if max_height > MAX_HEIGHT {
        return Err(Error::HeightBound {
            requested: max_height,
            limit: MAX_HEIGHT,
        });
    }
    let mut all: Vec<Tree> = alphabet.symbols_of_rank(0).map(Tree::leaf).collect();
    // `all[..level_start]` has height < h - 1, `all[level_start..]` height exactly h - 1.
    let mut level_start = 0;
    for _ in 0..max_height {
        let prev_len = all.len();
        for symbol in alphabet.symbols() {
            let rank = alphabet.rank(symbol);
            if rank == 0 {
                continue;
            }
            // Tuples over all[..prev_len] with at least one child from the newest level.
            let mut idx = alloc::vec![0usize; rank];
            loop {
                if idx.iter().any(|&i| i >= level_start) {
                    if all.len() >= MAX_TREES {
                        return Err(Error::Config(
                            "tree enumeration exceeds the tree-count limit".to_string(),
                        ));
                    }
                    let children = idx.iter().map(|&i| all[i].clone()).collect();
                    all.push(Tree::node(symbol, children));
                }
                if !crate::tuples::advance(&mut idx, prev_len) {
                    break;
                }
            }
        }
        level_start = prev_len;
        if all.len() == prev_len {
            break;
        }
    }
    Ok(all)
}

/// `{ t | height(t) <= max_height, t accepted }`.
pub fn language_fingerprint<A: TreeAcceptor + ?Sized>(
    acceptor: &A,
    max_height: usize,
) -> Result<BTreeSet<Tree>, Error> {
    let trees = enumerate_trees(acceptor.alphabet(), max_height)?;
    let mut out = BTreeSet::new();
    for t in trees {
        if acceptor.accepts(&t)? {
            out.insert(t);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{m_ex, parse};
    use crate::{states, Fta};
    use alloc::sync::Arc;

    /// Independent count: trees of height <= h over ranks `r_i` satisfy
    /// T(h) = c + sum_i T(h-1)^r_i.
    fn count(alphabet: &RankedAlphabet, h: usize) -> usize {
        let c = alphabet.symbols_of_rank(0).count();
        let mut t = c;
        for _ in 0..h {
            t = c + alphabet
                .symbols()
                .map(|s| alphabet.rank(s))
                .filter(|&r| r > 0)
                .map(|r| t.pow(r as u32))
                .sum::<usize>();
        }
        t
    }

    #[test]
    fn small_heights() {
        let a = RankedAlphabet::setting_a();
        let h0 = enumerate_trees(&a, 0).unwrap();
        assert_eq!(h0, [Tree::parse(&a, "alpha").unwrap()]);
        let h1 = enumerate_trees(&a, 1).unwrap();
        assert_eq!(
            h1,
            [
                Tree::parse(&a, "alpha").unwrap(),
                Tree::parse(&a, "sigma(alpha, alpha)").unwrap()
            ]
        );
        // counts frozen from the recurrence: 1, 2, 5, 26, 677
        let counts: Vec<usize> = (0..=4)
            .map(|h| enumerate_trees(&a, h).unwrap().len())
            .collect();
        assert_eq!(counts, [1, 2, 5, 26, 677]);
    }

    #[test]
    fn matches_recurrence_and_has_no_duplicates() {
        let alphabets = [
            RankedAlphabet::setting_a(),
            RankedAlphabet::setting_b(),
            RankedAlphabet::new([("a", 0), ("b", 0), ("g", 1), ("h", 3)]).unwrap(),
        ];
        for (a, max_h) in alphabets.iter().zip([3, 3, 2]) {
            for h in 0..=max_h {
                let trees = enumerate_trees(a, h).unwrap();
                assert_eq!(trees.len(), count(a, h));
                let set: BTreeSet<_> = trees.iter().cloned().collect();
                assert_eq!(set.len(), trees.len());
                assert!(trees
                    .iter()
                    .all(|t| t.height() <= h && t.validate(a).is_ok()));
            }
        }
    }

    #[test]
    fn prefix_chain() {
        let a = RankedAlphabet::setting_b();
        let mut prev = enumerate_trees(&a, 0).unwrap();
        for h in 1..=3 {
            let next = enumerate_trees(&a, h).unwrap();
            assert_eq!(&next[..prev.len()], &prev[..]);
            prev = next;
        }
    }

    #[test]
    fn height_guard() {
        let a = RankedAlphabet::setting_a();
        assert_eq!(
            enumerate_trees(&a, 6),
            Err(Error::HeightBound {
                requested: 6,
                limit: MAX_HEIGHT
            })
        );
    }

    #[test]
    fn fingerprints() {
        let m = m_ex();
        assert!(language_fingerprint(&m, 1).unwrap().is_empty());
        let fp3 = language_fingerprint(&m, 3).unwrap();
        assert!(fp3.contains(&parse(
            &m,
            "sigma(sigma(sigma(alpha, alpha), alpha), alpha)"
        )));
        let empty = Fta::new(
            Arc::new(RankedAlphabet::setting_a()),
            m.states().clone(),
            states![],
            m.transitions().to_vec(),
        )
        .unwrap();
        assert!(language_fingerprint(&empty, 4).unwrap().is_empty());
    }
}
