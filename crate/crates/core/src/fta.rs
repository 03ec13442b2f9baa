//! The nondeterministic finite tree automaton and its bottom-up semantics.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use smallvec::SmallVec;

use crate::alphabet::{RankedAlphabet, Symbol};
use crate::stateset::StateSet;
use crate::tree::Tree;
use crate::Error;

/// A state identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State(pub u32);

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type Args = SmallVec<[State; 2]>;

/// `symbol(args...) -> target`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub symbol: Symbol,
    pub args: Args,
    pub target: State,
}

impl Transition {
    pub fn new(symbol: Symbol, args: &[u32], target: u32) -> Self {
        Self {
            symbol,
            args: args.iter().map(|&q| State(q)).collect(),
            target: State(target),
        }
    }

    pub fn display<'a>(&'a self, alphabet: &'a RankedAlphabet) -> impl fmt::Display + 'a {
        DisplayTransition { t: self, alphabet }
    }
}

struct DisplayTransition<'a> {
    t: &'a Transition,
    alphabet: &'a RankedAlphabet,
}

impl fmt::Display for DisplayTransition<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.alphabet.name(self.t.symbol))?;
        if !self.t.args.is_empty() {
            f.write_str("(")?;
            for (i, q) in self.t.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{q}")?;
            }
            f.write_str(")")?;
        }
        write!(f, " -> {}", self.t.target)
    }
}

/// A finite-state tree automaton `(Q, Σ, F, P)`.
///
/// Transitions are kept sorted and free of duplicates; the transitions of a
/// symbol form one contiguous slice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fta {
    alphabet: Arc<RankedAlphabet>,
    states: StateSet,
    finals: StateSet,
    transitions: Vec<Transition>,
    by_symbol: Vec<(u32, u32)>,
}

impl Fta {
    pub fn new(
        alphabet: Arc<RankedAlphabet>,
        states: StateSet,
        finals: StateSet,
        mut transitions: Vec<Transition>,
    ) -> Result<Self, Error> {
        if let Some(q) = finals.difference(&states).iter().next() {
            return Err(Error::FinalNotAState(q));
        }
        for t in &transitions {
            if !alphabet.contains(t.symbol) {
                return Err(Error::UnknownSymbol(alloc::format!("#{}", t.symbol.0)));
            }
            let rank = alphabet.rank(t.symbol);
            if rank != t.args.len() {
                return Err(Error::Arity {
                    symbol: alphabet.name(t.symbol).to_string(),
                    rank,
                    given: t.args.len(),
                });
            }
            if let Some(&q) = t
                .args
                .iter()
                .chain(core::iter::once(&t.target))
                .find(|&&q| !states.contains(q))
            {
                return Err(Error::UnknownState(q));
            }
        }
        transitions.sort_unstable();
        if let Some(w) = transitions.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateTransition(
                w[0].display(&alphabet).to_string(),
            ));
        }
        Ok(Self::from_parts(alphabet, states, finals, transitions))
    }

    /// Builds an automaton from parts that are already valid, sorted and
    /// duplicate free.
    pub(crate) fn from_parts(
        alphabet: Arc<RankedAlphabet>,
        states: StateSet,
        finals: StateSet,
        transitions: Vec<Transition>,
    ) -> Self {
        debug_assert!(transitions.windows(2).all(|w| w[0] < w[1]));
        let mut by_symbol = Vec::with_capacity(alphabet.len());
        let mut start = 0usize;
        for s in alphabet.symbols() {
            let len = transitions[start..].partition_point(|t| t.symbol == s);
            by_symbol.push((start as u32, (start + len) as u32));
            start += len;
        }
        Self {
            alphabet,
            states,
            finals,
            transitions,
            by_symbol,
        }
    }

    pub fn alphabet(&self) -> &RankedAlphabet {
        &self.alphabet
    }

    pub fn shared_alphabet(&self) -> &Arc<RankedAlphabet> {
        &self.alphabet
    }

    pub fn states(&self) -> &StateSet {
        &self.states
    }

    pub fn finals(&self) -> &StateSet {
        &self.finals
    }

    /// `|Q|`.
    pub fn size(&self) -> usize {
        self.states.len()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transitions_of(&self, symbol: Symbol) -> &[Transition] {
        let (a, b) = self.by_symbol[symbol.index()];
        &self.transitions[a as usize..b as usize]
    }

    /// The subset-level map σ̄: every target `q` of a transition
    /// `symbol(q1..qk) -> q` with `qi ∈ args[i]`.
    pub fn sigma_bar(&self, symbol: Symbol, args: &[StateSet]) -> Result<StateSet, Error> {
        if !self.alphabet.contains(symbol) {
            return Err(Error::UnknownSymbol(alloc::format!("#{}", symbol.0)));
        }
        let rank = self.alphabet.rank(symbol);
        if rank != args.len() {
            return Err(Error::Arity {
                symbol: self.alphabet.name(symbol).to_string(),
                rank,
                given: args.len(),
            });
        }
        Ok(self.sigma_bar_unchecked(symbol, args))
    }

    pub(crate) fn sigma_bar_unchecked(&self, symbol: Symbol, args: &[StateSet]) -> StateSet {
        let mut out = StateSet::new();
        for t in self.transitions_of(symbol) {
            if t.args.iter().zip(args).all(|(q, set)| set.contains(*q)) {
                out.insert(t.target);
            }
        }
        out
    }

    /// Bottom-up evaluation P(t).
    pub fn evaluate(&self, tree: &Tree) -> Result<StateSet, Error> {
        match tree {
            Tree::State(q) => {
                if self.states.contains(*q) {
                    Ok(StateSet::singleton(*q))
                } else {
                    Err(Error::UnknownState(*q))
                }
            }
            Tree::Node { symbol, children } => {
                let args = children
                    .iter()
                    .map(|c| self.evaluate(c))
                    .collect::<Result<SmallVec<[StateSet; 2]>, _>>()?;
                self.sigma_bar(*symbol, &args)
            }
        }
    }

    /// Membership in L(M); the tree must not contain state leaves.
    pub fn accepts(&self, tree: &Tree) -> Result<bool, Error> {
        if let Some(q) = first_state_leaf(tree) {
            return Err(Error::StateLeaf(q));
        }
        Ok(self.evaluate(tree)?.intersects(&self.finals))
    }

    /// No two transitions share a left-hand side.
    pub fn is_deterministic(&self) -> bool {
        self.transitions
            .windows(2)
            .all(|w| (w[0].symbol, &w[0].args) != (w[1].symbol, &w[1].args))
    }

    /// Applies a state renaming. `map` must be injective on the states.
    pub fn rename(&self, map: impl Fn(State) -> State) -> Fta {
        let transitions = self
            .transitions
            .iter()
            .map(|t| Transition {
                symbol: t.symbol,
                args: t.args.iter().map(|&q| map(q)).collect(),
                target: map(t.target),
            })
            .collect();
        Fta::new(
            self.alphabet.clone(),
            self.states.iter().map(&map).collect(),
            self.finals.iter().map(&map).collect(),
            transitions,
        )
        .expect("renaming preserves validity")
    }

    /// The sub-automaton on `keep`: states, finals and transitions that only
    /// mention states in `keep`.
    pub fn restrict(&self, keep: &StateSet) -> Fta {
        let transitions = self
            .transitions
            .iter()
            .filter(|t| keep.contains(t.target) && t.args.iter().all(|&q| keep.contains(q)))
            .cloned()
            .collect();
        Fta::from_parts(
            self.alphabet.clone(),
            self.states.intersection(keep),
            self.finals.intersection(keep),
            transitions,
        )
    }

    pub fn describe(&self) -> String {
        alloc::format!(
            "{} states, {} finals, {} transitions",
            self.size(),
            self.finals.len(),
            self.transitions.len()
        )
    }
}

fn first_state_leaf(tree: &Tree) -> Option<State> {
    match tree {
        Tree::State(q) => Some(*q),
        Tree::Node { children, .. } => children.iter().find_map(first_state_leaf),
    }
}
