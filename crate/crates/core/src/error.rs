use alloc::string::String;

use crate::fta::State;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("duplicate symbol `{0}` in ranked alphabet")]
    DuplicateSymbol(String),
    #[error("ranked alphabet has no nullary symbol")]
    NoNullarySymbol,
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` has rank {rank} but was given {given} argument(s)")]
    Arity {
        symbol: String,
        rank: usize,
        given: usize,
    },
    #[error("state {0} is not a state of the automaton")]
    UnknownState(State),
    #[error("final state {0} is not a state of the automaton")]
    FinalNotAState(State),
    #[error("duplicate transition `{0}`")]
    DuplicateTransition(String),
    #[error("tree contains a state leaf {0} where a ground tree is required")]
    StateLeaf(State),
    #[error("alphabet has a symbol of rank {0}; only ranks 0 and 2 are supported here")]
    NonBinaryAlphabet(usize),
    #[error("automata are over different alphabets")]
    AlphabetMismatch,
    #[error("tree height {requested} exceeds the enumeration bound {limit}")]
    HeightBound { requested: usize, limit: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("peak density needs n > 1 (got n = {0})")]
    Domain(usize),
    #[error("no trim FTA after {attempts} attempts (n = {n}, d2 = {d2})")]
    Exhausted { n: usize, d2: f64, attempts: u64 },
    #[error("subset construction exceeded the budget of {0} states")]
    SubsetBudget(usize),
    #[error("tree syntax error at byte {pos}: {msg}")]
    TreeSyntax { pos: usize, msg: String },
}
