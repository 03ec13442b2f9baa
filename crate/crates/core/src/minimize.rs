//! Minimization to the canonical automaton and isomorphism of canonical forms.

use alloc::vec::Vec;
use core::ops::Deref;

use hashbrown::HashMap;

use crate::dta::{for_each_shell, shell_index, Dta, Table};
use crate::enumerate::TreeAcceptor;
use crate::fta::Fta;
use crate::tuples;
use crate::{determinize, Error, RankedAlphabet, Tree};

/// The minimal complete deterministic automaton of a language.
///
/// States are partition blocks numbered by their first member in the input.
/// The dead block, if any, is the sink; it is not counted by [`Self::size`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalFta {
    dta: Dta,
}

impl CanonicalFta {
    /// Number of states excluding the sink.
    pub fn size(&self) -> usize {
        self.dta.live_len()
    }

    pub fn dta(&self) -> &Dta {
        &self.dta
    }

    pub fn into_dta(self) -> Dta {
        self.dta
    }
}

impl Deref for CanonicalFta {
    type Target = Dta;

    fn deref(&self) -> &Dta {
        &self.dta
    }
}

impl TreeAcceptor for CanonicalFta {
    fn alphabet(&self) -> &RankedAlphabet {
        self.dta.alphabet()
    }
    fn accepts(&self, tree: &Tree) -> Result<bool, Error> {
        self.dta.accepts(tree)
    }
}

/// Determinize then minimize; the number of canonical states without the sink.
pub fn canonical_size(fta: &Fta) -> usize {
    minimize(&determinize(fta)).size()
}

/// Moore partition refinement.
///
/// Starts from {final, non-final}; a round splits a block whenever two of
/// its states reach different blocks for some symbol, argument position
/// and sibling argument. Rounds repeat until the block count is stable,
/// then the automaton is quotiented.
pub fn minimize(dta: &Dta) -> CanonicalFta {
    let class = coarsest_congruence(dta);
    CanonicalFta {
        dta: quotient(dta, &class),
    }
}

/// Block of every state in the coarsest congruence refining {F, Q \ F},
/// blocks numbered by first member.
///
/// Rounds compare states by a 64-bit digest of their transition rows
/// instead of the rows themselves. Equal rows give equal digests, so the
/// result can only be too coarse; it is checked to be a congruence and the
/// exact refinement takes over if it is not.
pub(crate) fn coarsest_congruence(dta: &Dta) -> Vec<u32> {
    let n = dta.len();
    let mut relabel: HashMap<(u32, u64), u32> = HashMap::new();
    let mut class: Vec<u32> = alloc::vec![0; n];
    let mut digest: Vec<u64> = alloc::vec![0; n];
    let mut blocks = relabel_by(
        &mut class,
        |i| u64::from(dta.is_final(i as u32)),
        &mut relabel,
    );
    loop {
        digest.iter_mut().for_each(|d| *d = 0);
        row_digests(dta, &class, &mut digest);
        let next = relabel_by(&mut class, |i| digest[i], &mut relabel);
        if next == blocks {
            break;
        }
        blocks = next;
    }
    if is_congruence(dta, &class) {
        class
    } else {
        coarsest_congruence_exact(dta)
    }
}

fn relabel_by(
    class: &mut [u32],
    key: impl Fn(usize) -> u64,
    relabel: &mut HashMap<(u32, u64), u32>,
) -> usize {
    relabel.clear();
    for (i, c) in class.iter_mut().enumerate() {
        let next = relabel.len() as u32;
        *c = *relabel.entry((*c, key(i))).or_insert(next);
    }
    relabel.len()
}

#[inline]
fn mix(salt: u64, sibling: u64, target: u32) -> u64 {
    let mut z = salt ^ sibling.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ u64::from(target) << 1;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Adds, for every state and every context it occurs in, a hash of the
/// context and the block it leads to. Sums make the digest independent of
/// the order the table is scanned in.
fn row_digests(dta: &Dta, class: &[u32], digest: &mut [u64]) {
    for (k, (s, table)) in dta.alphabet().symbols().zip(dta.tables()).enumerate() {
        let salt = |p: u64| (k as u64 + 1) << 8 | p;
        match table {
            Table::Nullary(_) => {}
            Table::Unary(v) => {
                for (i, &t) in v.iter().enumerate() {
                    digest[i] = digest[i].wrapping_add(mix(salt(0), 0, class[t as usize]));
                }
            }
            Table::Binary(v) => {
                let (left, right) = (salt(0), salt(1));
                let mut k = 0;
                for m in 0..digest.len() {
                    for j in 0..=m {
                        let c = class[v[k] as usize];
                        digest[m] = digest[m].wrapping_add(mix(left, j as u64, c));
                        digest[j] = digest[j].wrapping_add(mix(right, m as u64, c));
                        k += 1;
                    }
                    for i in 0..m {
                        let c = class[v[k] as usize];
                        digest[i] = digest[i].wrapping_add(mix(left, m as u64, c));
                        digest[m] = digest[m].wrapping_add(mix(right, i as u64, c));
                        k += 1;
                    }
                }
            }
            Table::Nary(map) => {
                let rank = dta.alphabet().rank(s);
                for (args, &t) in map {
                    let c = class[t as usize];
                    for p in 0..rank {
                        let siblings = args
                            .iter()
                            .enumerate()
                            .filter(|&(q, _)| q != p)
                            .fold(0u64, |h, (_, &a)| mix(h, u64::from(a), 0));
                        let q = args[p] as usize;
                        digest[q] = digest[q].wrapping_add(mix(salt(p as u64), siblings, c));
                    }
                }
            }
        }
    }
}

/// Whether the block of every transition target depends only on the
/// blocks of its arguments.
fn is_congruence(dta: &Dta, class: &[u32]) -> bool {
    let blocks = class.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut rep = alloc::vec![u32::MAX; blocks];
    for (i, &c) in class.iter().enumerate() {
        if rep[c as usize] == u32::MAX {
            rep[c as usize] = i as u32;
        }
    }
    let rep_of = |q: u32| rep[class[q as usize] as usize];
    let same = |a: u32, b: u32| class[a as usize] == class[b as usize];
    dta.tables().iter().all(|table| match table {
        Table::Nullary(_) => true,
        Table::Unary(v) => v
            .iter()
            .enumerate()
            .all(|(i, &t)| same(t, v[rep_of(i as u32) as usize])),
        Table::Binary(v) => {
            let mut ok = true;
            for_each_shell(v, |i, j, t| {
                ok &= same(t, v[shell_index(rep_of(i), rep_of(j))]);
            });
            ok
        }
        Table::Nary(map) => map.iter().all(|(args, &t)| {
            let reps: Vec<u32> = args.iter().map(|&a| rep_of(a)).collect();
            same(t, map[&reps])
        }),
    })
}

/// Column-by-column Moore refinement on exact successor blocks.
pub(crate) fn coarsest_congruence_exact(dta: &Dta) -> Vec<u32> {
    let n = dta.len();
    let mut relabel: HashMap<(u32, u32), u32> = HashMap::new();
    let mut class: Vec<u32> = alloc::vec![0; n];
    refine(
        &mut class,
        |i| u32::from(dta.is_final(i as u32)),
        &mut relabel,
    );
    loop {
        let old = class.clone();
        for (s, table) in dta.alphabet().symbols().zip(dta.tables()) {
            match table {
                Table::Nullary(_) => {}
                Table::Unary(v) => {
                    refine(&mut class, |i| old[v[i] as usize], &mut relabel);
                }
                Table::Binary(v) => {
                    for j in 0..n as u32 {
                        refine(
                            &mut class,
                            |i| old[v[shell_index(i as u32, j)] as usize],
                            &mut relabel,
                        );
                        refine(
                            &mut class,
                            |i| old[v[shell_index(j, i as u32)] as usize],
                            &mut relabel,
                        );
                    }
                }
                Table::Nary(map) => {
                    let rank = dta.alphabet().rank(s);
                    for p in 0..rank {
                        let mut others = alloc::vec![0usize; rank - 1];
                        loop {
                            let mut args: Vec<u32> = others.iter().map(|&x| x as u32).collect();
                            args.insert(p, 0);
                            refine(
                                &mut class,
                                |i| {
                                    let mut a = args.clone();
                                    a[p] = i as u32;
                                    old[map[&a] as usize]
                                },
                                &mut relabel,
                            );
                            if !tuples::advance(&mut others, n) {
                                break;
                            }
                        }
                    }
                }
            }
        }
        if class == old {
            break;
        }
    }
    class
}

/// Splits every block by `key`, renumbering blocks by first occurrence.
fn refine(class: &mut [u32], key: impl Fn(usize) -> u32, relabel: &mut HashMap<(u32, u32), u32>) {
    relabel.clear();
    for (i, c) in class.iter_mut().enumerate() {
        let next = relabel.len() as u32;
        *c = *relabel.entry((*c, key(i))).or_insert(next);
    }
}

fn quotient(dta: &Dta, class: &[u32]) -> Dta {
    let blocks = class.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut rep = alloc::vec![u32::MAX; blocks];
    for (i, &c) in class.iter().enumerate() {
        if rep[c as usize] == u32::MAX {
            rep[c as usize] = i as u32;
        }
    }
    let block_of = |q: u32| class[q as usize];
    let tables = dta
        .alphabet()
        .symbols()
        .zip(dta.tables())
        .map(|(s, table)| match table {
            Table::Nullary(t) => Table::Nullary(block_of(*t)),
            Table::Unary(_) => {
                Table::Unary(rep.iter().map(|&r| block_of(dta.step(s, &[r]))).collect())
            }
            Table::Binary(_) => {
                let mut v = Vec::with_capacity(blocks * blocks);
                for m in 0..blocks {
                    for j in 0..=m {
                        v.push(block_of(dta.step(s, &[rep[m], rep[j]])));
                    }
                    for i in 0..m {
                        v.push(block_of(dta.step(s, &[rep[i], rep[m]])));
                    }
                }
                Table::Binary(v)
            }
            Table::Nary(_) => {
                let rank = dta.alphabet().rank(s);
                let mut map = alloc::collections::BTreeMap::new();
                let mut idx = alloc::vec![0usize; rank];
                if blocks > 0 {
                    loop {
                        let args: Vec<u32> = idx.iter().map(|&b| rep[b]).collect();
                        map.insert(
                            idx.iter().map(|&b| b as u32).collect::<Vec<u32>>(),
                            block_of(dta.step(s, &args)),
                        );
                        if !tuples::advance(&mut idx, blocks) {
                            break;
                        }
                    }
                }
                Table::Nary(map)
            }
        })
        .collect();
    let finals = rep.iter().map(|&r| dta.is_final(r)).collect();
    let mut q = Dta::from_parts(dta.shared_alphabet().clone(), finals, None, tables);
    // all dead states share one block, and in an accessible automaton that
    // block is exactly the non-final one that absorbs every transition
    let dead = (0..blocks as u32).find(|&b| q.is_absorbing_sink(b));
    q.set_dead(dead);
    q
}

/// Whether a state bijection preserving finals and transitions exists.
///
/// Both automata must be accessible. The bijection is forced: it is grown
/// from the nullary symbols in lockstep, so one traversal decides.
pub fn isomorphic(a: &Dta, b: &Dta) -> bool {
    if a.alphabet() != b.alphabet() || a.len() != b.len() {
        return false;
    }
    let n = a.len();
    let mut m = Matching {
        ab: alloc::vec![u32::MAX; n],
        ba: alloc::vec![u32::MAX; n],
        order: Vec::with_capacity(n),
    };
    for s in a.alphabet().symbols_of_rank(0) {
        if !m.pair(a, b, a.step(s, &[]), b.step(s, &[])) {
            return false;
        }
    }
    let mut next = 0;
    while next < m.order.len() {
        for s in a.alphabet().symbols() {
            let rank = a.alphabet().rank(s);
            if rank == 0 {
                continue;
            }
            let mut ok = true;
            tuples::for_each_with_max(rank, next, |idx| {
                if !ok {
                    return;
                }
                let xs: smallvec::SmallVec<[u32; 2]> = idx.iter().map(|&i| m.order[i]).collect();
                let ys: smallvec::SmallVec<[u32; 2]> =
                    xs.iter().map(|&x| m.ab[x as usize]).collect();
                ok = m.pair(a, b, a.step(s, &xs), b.step(s, &ys));
            });
            if !ok {
                return false;
            }
        }
        next += 1;
    }
    m.order.len() == n
}

struct Matching {
    ab: Vec<u32>,
    ba: Vec<u32>,
    order: Vec<u32>,
}

impl Matching {
    fn pair(&mut self, a: &Dta, b: &Dta, x: u32, y: u32) -> bool {
        let (xi, yi) = (x as usize, y as usize);
        if self.ab[xi] == u32::MAX && self.ba[yi] == u32::MAX {
            if a.is_final(x) != b.is_final(y) {
                return false;
            }
            self.ab[xi] = y;
            self.ba[yi] = x;
            self.order.push(x);
            true
        } else {
            self.ab[xi] == y && self.ba[yi] == x
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::m_ex;
    use crate::{det_size, language_fingerprint, states, Fta, State, Transition};
    use alloc::sync::Arc;
    use alloc::vec;

    #[test]
    fn example_is_already_minimal() {
        let d = determinize(&m_ex());
        let c = minimize(&d);
        assert_eq!(c.size(), 4);
        assert_eq!(canonical_size(&m_ex()), 4);
        assert!(c.dead().is_some());
        assert!(isomorphic(&c, &c));
        assert!(isomorphic(&c, &minimize(&c)));
    }

    #[test]
    fn equivalent_finals_merge() {
        // α → 1, β → 2, both final, no binary transitions
        let a = Arc::new(RankedAlphabet::new([("a", 0), ("b", 0), ("s", 2)]).unwrap());
        let m = Fta::new(
            a.clone(),
            states![1, 2],
            states![1, 2],
            vec![
                Transition::new(a.lookup("a").unwrap(), &[], 1),
                Transition::new(a.lookup("b").unwrap(), &[], 2),
            ],
        )
        .unwrap();
        let d = determinize(&m);
        assert_eq!(det_size(&d), 2);
        let c = minimize(&d);
        assert_eq!(c.size(), 1);
        assert_eq!(
            language_fingerprint(&m, 3).unwrap(),
            language_fingerprint(&c, 3).unwrap()
        );
    }

    #[test]
    fn empty_language_has_size_zero() {
        let m = Fta::new(
            m_ex().shared_alphabet().clone(),
            states![0, 1, 2, 3],
            states![],
            m_ex().transitions().to_vec(),
        )
        .unwrap();
        assert_eq!(canonical_size(&m), 0);
        let c = minimize(&determinize(&m));
        assert_eq!(c.len(), 1);
        assert!(!isomorphic(&c, &minimize(&determinize(&m_ex()))));
    }

    #[test]
    fn universal_language_has_size_one() {
        let a = Arc::new(RankedAlphabet::setting_a());
        let alpha = a.lookup("alpha").unwrap();
        let sigma = a.lookup("sigma").unwrap();
        let mut ts = vec![
            Transition::new(alpha, &[], 1),
            Transition::new(alpha, &[], 2),
        ];
        for x in 1..=2 {
            for y in 1..=2 {
                for z in 1..=2 {
                    ts.push(Transition::new(sigma, &[x, y], z));
                }
            }
        }
        let m = Fta::new(a, states![1, 2], states![1, 2], ts).unwrap();
        let c = minimize(&determinize(&m));
        assert_eq!(c.size(), 1);
        assert_eq!(c.dead(), None);
    }

    #[test]
    fn renamed_copy_is_isomorphic() {
        let m = m_ex();
        let r = m.rename(|q| State(10 - q.0));
        let c1 = minimize(&determinize(&m));
        let c2 = minimize(&determinize(&r));
        assert!(isomorphic(&c1, &c2));
        assert!(isomorphic(&c2, &c1));
    }

    #[test]
    fn unary_and_ternary_symbols() {
        // strings a g^k: accept iff k is even, written redundantly with 4 states
        let a = Arc::new(RankedAlphabet::new([("a", 0), ("g", 1), ("h", 3)]).unwrap());
        let sa = a.lookup("a").unwrap();
        let g = a.lookup("g").unwrap();
        let m = Fta::new(
            a,
            states![0, 1, 2, 3],
            states![0, 2],
            vec![
                Transition::new(sa, &[], 0),
                Transition::new(g, &[0], 1),
                Transition::new(g, &[1], 2),
                Transition::new(g, &[2], 3),
                Transition::new(g, &[3], 0),
            ],
        )
        .unwrap();
        let d = determinize(&m);
        let c = minimize(&d);
        assert_eq!(det_size(&d), 4);
        assert_eq!(c.size(), 2);
        assert_eq!(
            language_fingerprint(&m, 3).unwrap(),
            language_fingerprint(&c, 3).unwrap()
        );
        assert!(isomorphic(&c, &minimize(&c)));
    }

    #[test]
    fn digest_refinement_matches_exact() {
        use crate::randgen::{generate, GenConfig, Seed};
        for alphabet in [RankedAlphabet::setting_a(), RankedAlphabet::setting_b()] {
            let alphabet = Arc::new(alphabet);
            for (n, d2) in [(3, 0.3), (5, 0.1), (7, 0.05), (8, 0.02)] {
                let config = GenConfig::new(n, alphabet.clone(), d2);
                let mut rng = Seed(2).stream(&[n as u64]);
                for _ in 0..10 {
                    let d = determinize(&generate(&config, &mut rng).unwrap());
                    let class = coarsest_congruence(&d);
                    assert_eq!(class, coarsest_congruence_exact(&d));
                    assert!(is_congruence(&d, &class));
                    let c = minimize(&d);
                    let dead = c.live_states().iter().position(|&live| !live);
                    assert_eq!(c.dead(), dead.map(|b| b as u32));
                }
            }
        }
    }

    #[test]
    fn congruence_check_rejects_a_merged_pair() {
        let d = determinize(&m_ex());
        let mut class: Vec<u32> = (0..d.len() as u32).collect();
        assert!(is_congruence(&d, &class));
        // merge the two final states {1,3} and {3} with a non-final one
        let finals: Vec<u32> = (0..d.len() as u32).filter(|&q| d.is_final(q)).collect();
        let other = (0..d.len() as u32)
            .find(|&q| !d.is_final(q) && Some(q) != d.dead())
            .unwrap();
        class[other as usize] = class[finals[0] as usize];
        assert!(!is_congruence(&d, &class));
    }
}
