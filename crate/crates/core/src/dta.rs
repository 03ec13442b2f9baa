//! Complete deterministic bottom-up tree automata with dense tables.
//!
//! States are `0..len`. Every symbol has a total transition table, so a run
//! never gets stuck; the dead state (if any) absorbs everything that can no
//! longer be accepted.
//!
//! Binary tables use a *shell* layout: all entries whose larger argument is
//! `m` occupy `m² .. (m+1)²`, first `(m, 0..=m)` then `(0..m, m)`. The table
//! can therefore grow while new states are being discovered.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;

use smallvec::SmallVec;

use crate::alphabet::{RankedAlphabet, Symbol};
use crate::enumerate::TreeAcceptor;
use crate::fta::{Fta, State, Transition};
use crate::stateset::StateSet;
use crate::tree::Tree;
use crate::tuples;
use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Table {
    Nullary(u32),
    Unary(Vec<u32>),
    Binary(Vec<u32>),
    Nary(BTreeMap<Vec<u32>, u32>),
}

impl Table {
    pub(crate) fn empty(rank: usize) -> Table {
        match rank {
            0 => Table::Nullary(u32::MAX),
            1 => Table::Unary(Vec::new()),
            2 => Table::Binary(Vec::new()),
            _ => Table::Nary(BTreeMap::new()),
        }
    }
}

#[inline]
pub(crate) fn shell_index(i: u32, j: u32) -> usize {
    let (i, j) = (i as usize, j as usize);
    let m = i.max(j);
    if i == m {
        m * m + j
    } else {
        m * m + m + 1 + i
    }
}

/// Calls `f(i, j, target)` for a binary table in storage order.
pub(crate) fn for_each_shell(v: &[u32], mut f: impl FnMut(u32, u32, u32)) {
    let mut k = 0;
    let mut m = 0u32;
    while k < v.len() {
        for j in 0..=m {
            f(m, j, v[k]);
            k += 1;
        }
        for i in 0..m {
            f(i, m, v[k]);
            k += 1;
        }
        m += 1;
    }
}

/// A complete deterministic tree automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dta {
    alphabet: Arc<RankedAlphabet>,
    finals: Vec<bool>,
    dead: Option<u32>,
    tables: Vec<Table>,
}

impl Dta {
    pub(crate) fn from_parts(
        alphabet: Arc<RankedAlphabet>,
        finals: Vec<bool>,
        dead: Option<u32>,
        tables: Vec<Table>,
    ) -> Self {
        Self {
            alphabet,
            finals,
            dead,
            tables,
        }
    }

    pub fn alphabet(&self) -> &RankedAlphabet {
        &self.alphabet
    }

    pub fn shared_alphabet(&self) -> &Arc<RankedAlphabet> {
        &self.alphabet
    }

    /// Number of states including the dead state.
    pub fn len(&self) -> usize {
        self.finals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.finals.is_empty()
    }

    /// Number of states excluding the dead state.
    pub fn live_len(&self) -> usize {
        self.len() - usize::from(self.dead.is_some())
    }

    pub fn is_final(&self, q: u32) -> bool {
        self.finals[q as usize]
    }

    /// The absorbing non-accepting state, when present.
    pub fn dead(&self) -> Option<u32> {
        self.dead
    }

    pub(crate) fn set_dead(&mut self, dead: Option<u32>) {
        self.dead = dead;
    }

    pub(crate) fn tables(&self) -> &[Table] {
        &self.tables
    }

    /// The successor of `symbol(args)`. Panics on arity mismatch or
    /// out-of-range states.
    #[inline]
    pub fn step(&self, symbol: Symbol, args: &[u32]) -> u32 {
        match &self.tables[symbol.index()] {
            Table::Nullary(t) => *t,
            Table::Unary(v) => v[args[0] as usize],
            Table::Binary(v) => v[shell_index(args[0], args[1])],
            Table::Nary(m) => m[args],
        }
    }

    /// The unique state reached on a ground tree.
    pub fn run(&self, tree: &Tree) -> Result<u32, Error> {
        match tree {
            Tree::State(q) => Err(Error::StateLeaf(*q)),
            Tree::Node { symbol, children } => {
                if !self.alphabet.contains(*symbol) {
                    return Err(Error::UnknownSymbol(alloc::format!("#{}", symbol.0)));
                }
                let rank = self.alphabet.rank(*symbol);
                if rank != children.len() {
                    return Err(Error::Arity {
                        symbol: self.alphabet.name(*symbol).to_string(),
                        rank,
                        given: children.len(),
                    });
                }
                let args = children
                    .iter()
                    .map(|c| self.run(c))
                    .collect::<Result<SmallVec<[u32; 2]>, _>>()?;
                Ok(self.step(*symbol, &args))
            }
        }
    }

    /// Calls `f(symbol, args, target)` for every table entry, symbol by
    /// symbol, argument tuples in lexicographic order.
    pub fn for_each_transition(&self, mut f: impl FnMut(Symbol, &[u32], u32)) {
        let n = self.len();
        for s in self.alphabet.symbols() {
            let rank = self.alphabet.rank(s);
            if rank == 0 {
                f(s, &[], self.step(s, &[]));
                continue;
            }
            if n == 0 {
                continue;
            }
            let mut idx = alloc::vec![0usize; rank];
            let mut args = alloc::vec![0u32; rank];
            loop {
                for (a, &i) in args.iter_mut().zip(&idx) {
                    *a = i as u32;
                }
                f(s, &args, self.step(s, &args));
                if !tuples::advance(&mut idx, n) {
                    break;
                }
            }
        }
    }

    /// States from which some context leads to acceptance. Every state of
    /// a constructed automaton is reachable, so any transition into a live
    /// state makes its arguments live.
    pub fn live_states(&self) -> Vec<bool> {
        let mut live = self.finals.clone();
        let mut changed = false;
        let mark = |live: &mut Vec<bool>, changed: &mut bool, a: u32| {
            if !live[a as usize] {
                live[a as usize] = true;
                *changed = true;
            }
        };
        loop {
            for table in &self.tables {
                match table {
                    Table::Nullary(_) => {}
                    Table::Unary(v) => {
                        for (i, &t) in v.iter().enumerate() {
                            if live[t as usize] {
                                mark(&mut live, &mut changed, i as u32);
                            }
                        }
                    }
                    Table::Binary(v) => for_each_shell(v, |i, j, t| {
                        if live[t as usize] {
                            mark(&mut live, &mut changed, i);
                            mark(&mut live, &mut changed, j);
                        }
                    }),
                    Table::Nary(map) => {
                        for (args, &t) in map {
                            if live[t as usize] {
                                for &a in args {
                                    mark(&mut live, &mut changed, a);
                                }
                            }
                        }
                    }
                }
            }
            if !core::mem::take(&mut changed) {
                return live;
            }
        }
    }

    /// A non-final state that every transition with it as an argument
    /// leads back to.
    pub(crate) fn is_absorbing_sink(&self, q: u32) -> bool {
        if self.is_final(q) {
            return false;
        }
        let n = self.len() as u32;
        self.tables.iter().all(|table| match table {
            Table::Nullary(_) => true,
            Table::Unary(v) => v[q as usize] == q,
            Table::Binary(v) => {
                (0..n).all(|x| v[shell_index(q, x)] == q && v[shell_index(x, q)] == q)
            }
            Table::Nary(map) => map.iter().all(|(args, &t)| t == q || !args.contains(&q)),
        })
    }

    /// The partial automaton obtained by dropping the dead state, with the
    /// remaining states renumbered `0..live_len()` in order.
    pub fn to_fta(&self) -> Fta {
        let label = |q: u32| -> Option<State> {
            match self.dead {
                Some(d) if q == d => None,
                Some(d) if q > d => Some(State(q - 1)),
                _ => Some(State(q)),
            }
        };
        let mut transitions = Vec::new();
        self.for_each_transition(|s, args, target| {
            let Some(target) = label(target) else {
                return;
            };
            let args: Option<SmallVec<[State; 2]>> = args.iter().map(|&a| label(a)).collect();
            if let Some(args) = args {
                transitions.push(Transition {
                    symbol: s,
                    args,
                    target,
                });
            }
        });
        let states: StateSet = (0..self.live_len() as u32).map(State).collect();
        let finals: StateSet = (0..self.len() as u32)
            .filter(|&q| self.finals[q as usize])
            .filter_map(label)
            .collect();
        transitions.sort_unstable();
        Fta::from_parts(self.alphabet.clone(), states, finals, transitions)
    }
}

impl TreeAcceptor for Dta {
    fn alphabet(&self) -> &RankedAlphabet {
        &self.alphabet
    }

    fn accepts(&self, tree: &Tree) -> Result<bool, Error> {
        Ok(self.is_final(self.run(tree)?))
    }
}
