//! Accessible subset construction.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::Deref;

use hashbrown::HashMap;

use crate::alphabet::Symbol;
use crate::dta::{Dta, Table};
use crate::fta::{Fta, State};
use crate::stateset::StateSet;
use crate::tuples;
use crate::Error;

/// The determinized automaton: a [`Dta`] whose state `i` is the subset
/// `subset(i)` of the source automaton's states.
///
/// Only subsets reachable from the nullary symbols are built. The empty
/// subset appears exactly when some σ̄ evaluates to it and is then the dead
/// state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfta {
    dta: Dta,
    subsets: Vec<StateSet>,
}

impl Dfta {
    pub fn subsets(&self) -> &[StateSet] {
        &self.subsets
    }

    pub fn subset(&self, q: u32) -> &StateSet {
        &self.subsets[q as usize]
    }

    /// Index of the state for `subset`, if it was constructed.
    pub fn find(&self, subset: &StateSet) -> Option<u32> {
        self.subsets
            .iter()
            .position(|s| s == subset)
            .map(|i| i as u32)
    }

    pub fn dta(&self) -> &Dta {
        &self.dta
    }

    pub fn into_dta(self) -> Dta {
        self.dta
    }
}

impl Deref for Dfta {
    type Target = Dta;

    fn deref(&self) -> &Dta {
        &self.dta
    }
}

impl crate::TreeAcceptor for Dfta {
    fn alphabet(&self) -> &crate::RankedAlphabet {
        self.dta.alphabet()
    }
    fn accepts(&self, tree: &crate::Tree) -> Result<bool, Error> {
        self.dta.accepts(tree)
    }
}

/// Number of constructed subset states, not counting the empty subset.
pub fn det_size(dfta: &Dfta) -> usize {
    dfta.live_len()
}

pub fn determinize(fta: &Fta) -> Dfta {
    determinize_bounded(fta, usize::MAX).expect("unbounded construction cannot exceed its budget")
}

/// Like [`determinize`] but fails once more than `max_states` subset
/// states (the empty one included) have been created.
pub fn determinize_bounded(fta: &Fta, max_states: usize) -> Result<Dfta, Error> {
    let small = fta.states().last().is_none_or(|q| q.0 < 64);
    if small && fta.alphabet().max_rank() <= 2 {
        WordBuilder::new(fta, max_states).run()
    } else {
        Builder::new(fta, max_states).run()
    }
}

/// The general construction, for any ranks and state identifiers.
#[cfg(test)]
pub(crate) fn determinize_general(fta: &Fta, max_states: usize) -> Result<Dfta, Error> {
    Builder::new(fta, max_states).run()
}

/// For a binary symbol and a discovered subset `Q2`: every first argument
/// `q1` paired with the targets of `σ(q1, q2) → q` over `q2 ∈ Q2`.
type Column = Vec<(State, StateSet)>;

struct Builder<'a> {
    fta: &'a Fta,
    max_states: usize,
    subsets: Vec<StateSet>,
    index: HashMap<StateSet, u32>,
    tables: Vec<Table>,
    columns: Vec<Vec<Column>>,
}

impl<'a> Builder<'a> {
    fn new(fta: &'a Fta, max_states: usize) -> Self {
        let alphabet = fta.alphabet();
        Self {
            fta,
            max_states,
            subsets: Vec::new(),
            index: HashMap::new(),
            tables: alphabet
                .symbols()
                .map(|s| Table::empty(alphabet.rank(s)))
                .collect(),
            columns: alphabet.symbols().map(|_| Vec::new()).collect(),
        }
    }

    fn intern(&mut self, set: StateSet) -> Result<u32, Error> {
        if let Some(&i) = self.index.get(&set) {
            return Ok(i);
        }
        if self.subsets.len() >= self.max_states {
            return Err(Error::SubsetBudget(self.max_states));
        }
        let i = self.subsets.len() as u32;
        self.index.insert(set.clone(), i);
        self.subsets.push(set);
        Ok(i)
    }

    fn column(&self, symbol: Symbol, q2s: &StateSet) -> Column {
        let mut col: Column = Vec::new();
        for t in self.fta.transitions_of(symbol) {
            if !q2s.contains(t.args[1]) {
                continue;
            }
            match col.last_mut() {
                Some((q1, targets)) if *q1 == t.args[0] => {
                    targets.insert(t.target);
                }
                _ => col.push((t.args[0], StateSet::singleton(t.target))),
            }
        }
        col
    }

    fn binary_step(col: &Column, q1s: &StateSet) -> StateSet {
        let mut out = StateSet::new();
        for (q1, targets) in col {
            if q1s.contains(*q1) {
                out.union_with(targets);
            }
        }
        out
    }

    fn run(mut self) -> Result<Dfta, Error> {
        let alphabet = self.fta.shared_alphabet().clone();
        for s in alphabet.symbols_of_rank(0) {
            let target = self.fta.sigma_bar_unchecked(s, &[]);
            let t = self.intern(target)?;
            self.tables[s.index()] = Table::Nullary(t);
        }
        let mut m = 0usize;
        while m < self.subsets.len() {
            for s in alphabet.symbols() {
                match alphabet.rank(s) {
                    0 => {}
                    1 => {
                        let target = self
                            .fta
                            .sigma_bar_unchecked(s, core::slice::from_ref(&self.subsets[m]));
                        let t = self.intern(target)?;
                        let Table::Unary(v) = &mut self.tables[s.index()] else {
                            unreachable!()
                        };
                        v.push(t);
                    }
                    2 => self.binary_shell(s, m)?,
                    r => self.nary_shell(s, r, m)?,
                }
            }
            m += 1;
        }
        let finals = self
            .subsets
            .iter()
            .map(|q| q.intersects(self.fta.finals()))
            .collect();
        let dead = self.index.get(&StateSet::new()).copied();
        Ok(Dfta {
            dta: Dta::from_parts(alphabet, finals, dead, self.tables),
            subsets: self.subsets,
        })
    }

    /// Fills entries `(m, 0..=m)` then `(0..m, m)`, the shell layout order.
    fn binary_shell(&mut self, s: Symbol, m: usize) -> Result<(), Error> {
        let col = self.column(s, &self.subsets[m]);
        self.columns[s.index()].push(col);
        for j in 0..=m {
            let target = Self::binary_step(&self.columns[s.index()][j], &self.subsets[m]);
            let t = self.intern(target)?;
            self.push_binary(s, t);
        }
        for i in 0..m {
            let target = Self::binary_step(&self.columns[s.index()][m], &self.subsets[i]);
            let t = self.intern(target)?;
            self.push_binary(s, t);
        }
        Ok(())
    }

    fn push_binary(&mut self, s: Symbol, t: u32) {
        let Table::Binary(v) = &mut self.tables[s.index()] else {
            unreachable!()
        };
        v.push(t);
    }

    fn nary_shell(&mut self, s: Symbol, rank: usize, m: usize) -> Result<(), Error> {
        let mut entries: Vec<(Vec<u32>, StateSet)> = Vec::new();
        tuples::for_each_with_max(rank, m, |idx| {
            let args: Vec<StateSet> = idx.iter().map(|&i| self.subsets[i].clone()).collect();
            let target = self.fta.sigma_bar_unchecked(s, &args);
            entries.push((idx.iter().map(|&i| i as u32).collect(), target));
        });
        let mut interned: BTreeMap<Vec<u32>, u32> = BTreeMap::new();
        for (key, target) in entries {
            interned.insert(key, self.intern(target)?);
        }
        let Table::Nary(map) = &mut self.tables[s.index()] else {
            unreachable!()
        };
        map.extend(interned);
        Ok(())
    }
}

/// The construction for ranks at most 2 and state identifiers below 64:
/// subsets are single words, and the successor of a subset under a unary
/// symbol or a binary column is an OR of per-nibble lookups.
struct WordBuilder<'a> {
    fta: &'a Fta,
    max_states: usize,
    subsets: Vec<u64>,
    dense: Vec<u32>,
    sparse: HashMap<u64, u32>,
    nibbles: usize,
    tables: Vec<Table>,
    columns: Vec<Vec<u64>>,
}

const DENSE_BITS: u32 = 16;

impl<'a> WordBuilder<'a> {
    fn new(fta: &'a Fta, max_states: usize) -> Self {
        let alphabet = fta.alphabet();
        let bits = fta.states().last().map_or(0, |q| q.0 + 1);
        Self {
            fta,
            max_states,
            subsets: Vec::new(),
            dense: if bits <= DENSE_BITS {
                alloc::vec![u32::MAX; 1 << bits]
            } else {
                Vec::new()
            },
            sparse: HashMap::new(),
            nibbles: bits.div_ceil(4) as usize,
            tables: alphabet
                .symbols()
                .map(|s| Table::empty(alphabet.rank(s)))
                .collect(),
            columns: alphabet.symbols().map(|_| Vec::new()).collect(),
        }
    }

    #[inline]
    fn intern(&mut self, set: u64) -> Result<u32, Error> {
        let slot = if self.dense.is_empty() {
            self.sparse.get(&set).copied()
        } else {
            Some(self.dense[set as usize]).filter(|&i| i != u32::MAX)
        };
        if let Some(i) = slot {
            return Ok(i);
        }
        if self.subsets.len() >= self.max_states {
            return Err(Error::SubsetBudget(self.max_states));
        }
        let i = self.subsets.len() as u32;
        if self.dense.is_empty() {
            self.sparse.insert(set, i);
        } else {
            self.dense[set as usize] = i;
        }
        self.subsets.push(set);
        Ok(i)
    }

    /// Lookup table of `targets`: entry `16c + x` is the union of
    /// `targets[4c + b]` over the bits `b` of `x`.
    fn nibble_table(&self, targets: &[u64; 64], out: &mut Vec<u64>) {
        for c in 0..self.nibbles {
            for x in 0..16usize {
                let mut acc = 0;
                for b in 0..4 {
                    if x >> b & 1 == 1 {
                        acc |= targets[4 * c + b];
                    }
                }
                out.push(acc);
            }
        }
    }

    #[inline]
    fn apply(table: &[u64], set: u64) -> u64 {
        table
            .chunks_exact(16)
            .enumerate()
            .fold(0, |acc, (c, t)| acc | t[(set >> (4 * c) & 15) as usize])
    }

    fn run(mut self) -> Result<Dfta, Error> {
        let alphabet = self.fta.shared_alphabet().clone();
        let stride = 16 * self.nibbles;
        let mut unary: Vec<Vec<u64>> = alphabet.symbols().map(|_| Vec::new()).collect();
        for s in alphabet.symbols() {
            match alphabet.rank(s) {
                0 => {
                    let target = self.fta.sigma_bar_unchecked(s, &[]).low_bits();
                    let t = self.intern(target)?;
                    self.tables[s.index()] = Table::Nullary(t);
                }
                1 => {
                    let mut targets = [0u64; 64];
                    for t in self.fta.transitions_of(s) {
                        targets[t.args[0].0 as usize] |= 1 << t.target.0;
                    }
                    let mut table = Vec::with_capacity(stride);
                    self.nibble_table(&targets, &mut table);
                    unary[s.index()] = table;
                }
                _ => {}
            }
        }
        let mut targets = [0u64; 64];
        let mut m = 0usize;
        while m < self.subsets.len() {
            let set = self.subsets[m];
            for s in alphabet.symbols() {
                match alphabet.rank(s) {
                    1 => {
                        let t = self.intern(Self::apply(&unary[s.index()], set))?;
                        let Table::Unary(v) = &mut self.tables[s.index()] else {
                            unreachable!()
                        };
                        v.push(t);
                    }
                    2 => {
                        targets.fill(0);
                        for t in self.fta.transitions_of(s) {
                            if set >> t.args[1].0 & 1 == 1 {
                                targets[t.args[0].0 as usize] |= 1 << t.target.0;
                            }
                        }
                        let mut columns = core::mem::take(&mut self.columns[s.index()]);
                        self.nibble_table(&targets, &mut columns);
                        let Table::Binary(mut v) =
                            core::mem::replace(&mut self.tables[s.index()], Table::Nullary(0))
                        else {
                            unreachable!()
                        };
                        for j in 0..=m {
                            let target = Self::apply(&columns[j * stride..(j + 1) * stride], set);
                            v.push(self.intern(target)?);
                        }
                        let own = &columns[m * stride..(m + 1) * stride];
                        for i in 0..m {
                            v.push(self.intern(Self::apply(own, self.subsets[i]))?);
                        }
                        self.columns[s.index()] = columns;
                        self.tables[s.index()] = Table::Binary(v);
                    }
                    _ => {}
                }
            }
            m += 1;
        }
        let finals_mask = self.fta.finals().low_bits();
        let finals = self.subsets.iter().map(|&q| q & finals_mask != 0).collect();
        let dead = if self.dense.is_empty() {
            self.sparse.get(&0).copied()
        } else {
            Some(self.dense[0]).filter(|&i| i != u32::MAX)
        };
        Ok(Dfta {
            dta: Dta::from_parts(alphabet, finals, dead, self.tables),
            subsets: self.subsets.into_iter().map(StateSet::from_bits).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::m_ex;
    use crate::{language_fingerprint, states, RankedAlphabet, Transition};
    use alloc::sync::Arc;
    use alloc::vec;

    #[test]
    fn example_two() {
        let m = m_ex();
        let d = determinize(&m);
        let alpha = m.alphabet().lookup("alpha").unwrap();
        let sigma = m.alphabet().lookup("sigma").unwrap();
        let id = |s: StateSet| d.find(&s).unwrap();
        let mut live: Vec<StateSet> = d
            .subsets()
            .iter()
            .filter(|s| !s.is_empty())
            .cloned()
            .collect();
        live.sort();
        let mut expect = vec![states![0, 2], states![1], states![1, 3], states![3]];
        expect.sort();
        assert_eq!(live, expect);
        assert_eq!(det_size(&d), 4);
        assert!(d.dead().is_some());
        assert_eq!(d.step(alpha, &[]), id(states![0, 2]));
        let s02 = id(states![0, 2]);
        let s1 = id(states![1]);
        let s13 = id(states![1, 3]);
        let s3 = id(states![3]);
        let sink = d.dead().unwrap();
        assert_eq!(d.step(sigma, &[s02, s02]), s1);
        assert_eq!(d.step(sigma, &[s1, s02]), s13);
        assert_eq!(d.step(sigma, &[s13, s02]), s13);
        assert_eq!(d.step(sigma, &[s1, s13]), s3);
        assert_eq!(d.step(sigma, &[s1, s3]), s3);
        // The printed example omits two entries that follow from σ(1,3) → 3.
        assert_eq!(d.step(sigma, &[s13, s13]), s3);
        assert_eq!(d.step(sigma, &[s13, s3]), s3);
        // everything else goes to the sink
        let listed = [
            (s02, s02),
            (s1, s02),
            (s13, s02),
            (s1, s13),
            (s1, s3),
            (s13, s13),
            (s13, s3),
        ];
        for a in 0..d.len() as u32 {
            for b in 0..d.len() as u32 {
                if !listed.contains(&(a, b)) {
                    assert_eq!(d.step(sigma, &[a, b]), sink, "({a},{b})");
                }
            }
        }
        let finals: Vec<StateSet> = (0..d.len() as u32)
            .filter(|&q| d.is_final(q))
            .map(|q| d.subset(q).clone())
            .collect();
        assert_eq!(finals.len(), 2);
        assert!(finals.contains(&states![1, 3]) && finals.contains(&states![3]));
    }

    #[test]
    fn deterministic_and_equivalent() {
        let m = m_ex();
        let d = determinize(&m);
        assert!(d.to_fta().is_deterministic());
        assert_eq!(
            language_fingerprint(&m, 4).unwrap(),
            language_fingerprint(&d, 4).unwrap()
        );
    }

    #[test]
    fn no_nullary_transitions_gives_only_the_sink() {
        let a = Arc::new(RankedAlphabet::setting_a());
        let sigma = a.lookup("sigma").unwrap();
        let m = Fta::new(
            a,
            states![1],
            states![1],
            vec![Transition::new(sigma, &[1, 1], 1)],
        )
        .unwrap();
        let d = determinize(&m);
        assert_eq!(d.len(), 1);
        assert_eq!(d.dead(), Some(0));
        assert_eq!(det_size(&d), 0);
        assert!(language_fingerprint(&d, 3).unwrap().is_empty());
    }

    #[test]
    fn one_state_loop() {
        let a = Arc::new(RankedAlphabet::setting_a());
        let alpha = a.lookup("alpha").unwrap();
        let sigma = a.lookup("sigma").unwrap();
        let m = Fta::new(
            a,
            states![1],
            states![1],
            vec![
                Transition::new(alpha, &[], 1),
                Transition::new(sigma, &[1, 1], 1),
            ],
        )
        .unwrap();
        let d = determinize(&m);
        assert_eq!(det_size(&d), 1);
        assert_eq!(d.dead(), None);
    }

    #[test]
    fn deterministic_input_keeps_singletons() {
        // deterministic and trim: one target per left-hand side
        let a = Arc::new(RankedAlphabet::setting_a());
        let alpha = a.lookup("alpha").unwrap();
        let sigma = a.lookup("sigma").unwrap();
        let m = Fta::new(
            a,
            states![1, 2, 3],
            states![3],
            vec![
                Transition::new(alpha, &[], 1),
                Transition::new(sigma, &[1, 1], 2),
                Transition::new(sigma, &[2, 1], 3),
                Transition::new(sigma, &[3, 3], 3),
            ],
        )
        .unwrap();
        assert!(m.is_deterministic());
        let d = determinize(&m);
        assert_eq!(det_size(&d), 3);
        assert!(d.subsets().iter().all(|s| s.len() <= 1));
    }

    #[test]
    fn general_ranks() {
        let a = Arc::new(RankedAlphabet::new([("a", 0), ("g", 1), ("h", 3)]).unwrap());
        let sa = a.lookup("a").unwrap();
        let g = a.lookup("g").unwrap();
        let h = a.lookup("h").unwrap();
        let m = Fta::new(
            a,
            states![0, 1, 2],
            states![2],
            vec![
                Transition::new(sa, &[], 0),
                Transition::new(sa, &[], 1),
                Transition::new(g, &[0], 1),
                Transition::new(h, &[1, 0, 1], 2),
                Transition::new(h, &[2, 2, 2], 2),
            ],
        )
        .unwrap();
        let d = determinize(&m);
        assert_eq!(
            language_fingerprint(&m, 3).unwrap(),
            language_fingerprint(&d, 3).unwrap()
        );
        assert!(d.to_fta().is_deterministic());
    }

    #[test]
    fn budget() {
        let m = m_ex();
        assert_eq!(determinize_bounded(&m, 3), Err(Error::SubsetBudget(3)));
        assert!(determinize_bounded(&m, 5).is_ok());
    }

    #[test]
    fn word_construction_matches_general() {
        use crate::randgen::{generate, GenConfig, Seed};
        for (k, alphabet) in [RankedAlphabet::setting_a(), RankedAlphabet::setting_b()]
            .into_iter()
            .enumerate()
        {
            let alphabet = Arc::new(alphabet);
            for (n, d2) in [(2, 0.5), (4, 0.17), (6, 0.08), (9, 0.03), (17, 0.004)] {
                let config = GenConfig::new(n, alphabet.clone(), d2);
                let mut rng = Seed(11).stream(&[k as u64, n as u64]);
                for _ in 0..8 {
                    let m = generate(&config, &mut rng).unwrap();
                    let fast = determinize(&m);
                    assert_eq!(fast, determinize_general(&m, usize::MAX).unwrap());
                    assert_eq!(
                        determinize_bounded(&m, 3).is_err(),
                        determinize_general(&m, 3).is_err()
                    );
                }
            }
        }
    }

    #[test]
    fn word_construction_with_unary_symbols() {
        let a = Arc::new(RankedAlphabet::new([("a", 0), ("b", 0), ("g", 1), ("s", 2)]).unwrap());
        let sym = |x| a.lookup(x).unwrap();
        let m = Fta::new(
            a.clone(),
            states![0, 1, 2, 40],
            states![2, 40],
            vec![
                Transition::new(sym("a"), &[], 0),
                Transition::new(sym("a"), &[], 1),
                Transition::new(sym("b"), &[], 40),
                Transition::new(sym("g"), &[0], 2),
                Transition::new(sym("g"), &[40], 40),
                Transition::new(sym("g"), &[40], 1),
                Transition::new(sym("s"), &[1, 2], 40),
                Transition::new(sym("s"), &[2, 40], 0),
            ],
        )
        .unwrap();
        assert_eq!(
            determinize(&m),
            determinize_general(&m, usize::MAX).unwrap()
        );
    }
}
