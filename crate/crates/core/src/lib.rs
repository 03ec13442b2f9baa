//! Bottom-up finite tree automata over ranked alphabets.
//!
//! The crate covers the data model ([`RankedAlphabet`], [`Tree`], [`Fta`],
//! [`StateSet`]), the evaluation semantics, the accessible subset
//! construction ([`determinize`]), trimness ([`trim`]), minimization to the
//! canonical automaton ([`minimize`]), the random generation model
//! ([`randgen`]) and the hardest-instance density formulas ([`density`]).
//!
//! Everything here is `no_std` and only needs `alloc`. IO, the experiment
//! harness and the command line live in the `fta-lab` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod alphabet;
pub mod density;
pub mod determinize;
pub mod dta;
pub mod enumerate;
mod error;
pub mod fta;
pub mod minimize;
pub mod randgen;
pub mod stateset;
pub mod tree;
pub mod trim;
mod tuples;

#[cfg(test)]
pub(crate) mod testutil;

pub use alphabet::{RankedAlphabet, Symbol};
pub use determinize::{det_size, determinize, determinize_bounded, Dfta};
pub use dta::Dta;
pub use enumerate::{enumerate_trees, language_fingerprint, TreeAcceptor};
pub use error::Error;
pub use fta::{Fta, State, Transition};
pub use minimize::{canonical_size, isomorphic, minimize, CanonicalFta};
pub use stateset::StateSet;
pub use tree::Tree;
pub use trim::{coreachable, is_trim, reachable};
