//! Ranked alphabets.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::Error;

/// Index of a symbol inside its [`RankedAlphabet`].
///
/// Symbols are stored sorted by name, so comparing two `Symbol`s of the same
/// alphabet compares their names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub u16);

impl Symbol {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RankedAlphabet {
    names: Vec<String>,
    ranks: Vec<usize>,
}

impl RankedAlphabet {
    /// Builds an alphabet from `(name, rank)` pairs. Any rank is accepted
    /// here; [`Self::require_binary`] enforces the `{0, 2}` restriction.
    pub fn new<I, S>(symbols: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut pairs: Vec<(String, usize)> =
            symbols.into_iter().map(|(s, r)| (s.into(), r)).collect();
        pairs.sort();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DuplicateSymbol(w[0].0.clone()));
            }
        }
        if !pairs.iter().any(|&(_, r)| r == 0) {
            return Err(Error::NoNullarySymbol);
        }
        if pairs.len() > u16::MAX as usize {
            return Err(Error::Config("too many symbols".to_string()));
        }
        let (names, ranks) = pairs.into_iter().unzip();
        Ok(Self { names, ranks })
    }

    /// `{alpha/0, sigma/2}`.
    pub fn setting_a() -> Self {
        Self::new([("alpha", 0), ("sigma", 2)]).expect("valid alphabet")
    }

    /// `{alpha/0, sigma/2, delta/2}`.
    pub fn setting_b() -> Self {
        Self::new([("alpha", 0), ("sigma", 2), ("delta", 2)]).expect("valid alphabet")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.names.len()).map(|i| Symbol(i as u16))
    }

    pub fn symbols_of_rank(&self, rank: usize) -> impl Iterator<Item = Symbol> + '_ {
        self.symbols().filter(move |&s| self.rank(s) == rank)
    }

    pub fn rank(&self, symbol: Symbol) -> usize {
        self.ranks[symbol.index()]
    }

    pub fn name(&self, symbol: Symbol) -> &str {
        &self.names[symbol.index()]
    }

    pub fn contains(&self, symbol: Symbol) -> bool {
        symbol.index() < self.names.len()
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.names
            .binary_search_by(|n| n.as_str().cmp(name))
            .ok()
            .map(|i| Symbol(i as u16))
    }

    pub fn max_rank(&self) -> usize {
        self.ranks.iter().copied().max().unwrap_or(0)
    }

    pub fn is_binary(&self) -> bool {
        self.ranks.iter().all(|&r| r == 0 || r == 2)
    }

    pub fn require_binary(&self) -> Result<(), Error> {
        match self.ranks.iter().find(|&&r| r != 0 && r != 2) {
            Some(&r) => Err(Error::NonBinaryAlphabet(r)),
            None => Ok(()),
        }
    }
}

impl fmt::Display for RankedAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (name, rank)) in self.names.iter().zip(&self.ranks).enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{name}/{rank}")?;
        }
        Ok(())
    }
}
