//! Bit-vector sets of states.

use core::fmt;

use smallvec::SmallVec;

use crate::fta::State;

const WORD: usize = 64;

/// A set of states stored as a bit-vector indexed by state identifier.
///
/// Trailing zero words are never stored, so two sets are `==` exactly when
/// they have the same members. Sets over identifiers below 128 never touch
/// the heap.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet {
    words: SmallVec<[u64; 2]>,
}

impl StateSet {
    pub fn new() -> Self {
        Self {
            words: SmallVec::new(),
        }
    }

    pub fn singleton(q: State) -> Self {
        let mut s = Self::new();
        s.insert(q);
        s
    }

    /// `{0, 1, ..., n-1}` shifted by `offset`.
    pub fn range(offset: u32, n: u32) -> Self {
        (offset..offset + n).map(State).collect()
    }

    /// Builds a set from a single word; bit `i` is state `i`.
    pub fn from_bits(bits: u64) -> Self {
        let mut s = Self::new();
        if bits != 0 {
            s.words.push(bits);
        }
        s
    }

    /// The lowest 64 bits of the set.
    pub fn low_bits(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    #[inline]
    pub fn contains(&self, q: State) -> bool {
        let (w, b) = split(q);
        self.words.get(w).is_some_and(|x| x >> b & 1 == 1)
    }

    pub fn insert(&mut self, q: State) -> bool {
        let (w, b) = split(q);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        let fresh = self.words[w] >> b & 1 == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    pub fn remove(&mut self, q: State) -> bool {
        let (w, b) = split(q);
        let Some(x) = self.words.get_mut(w) else {
            return false;
        };
        let present = *x >> b & 1 == 1;
        *x &= !(1 << b);
        self.normalize();
        present
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn clear(&mut self) {
        self.words.clear();
    }

    #[inline]
    pub fn union_with(&mut self, other: &StateSet) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn intersect_with(&mut self, other: &StateSet) {
        self.words.truncate(other.words.len());
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
        self.normalize();
    }

    pub fn difference_with(&mut self, other: &StateSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !*b;
        }
        self.normalize();
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn difference(&self, other: &StateSet) -> StateSet {
        let mut s = self.clone();
        s.difference_with(other);
        s
    }

    #[inline]
    pub fn intersects(&self, other: &StateSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.words.len() <= other.words.len()
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    /// Members in increasing order.
    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    /// Largest member, if any.
    pub fn last(&self) -> Option<State> {
        let last = self.words.last()?;
        let w = self.words.len() - 1;
        Some(State(
            (w * WORD + 63 - last.leading_zeros() as usize) as u32,
        ))
    }

    fn normalize(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

#[inline]
fn split(q: State) -> (usize, u32) {
    let i = q.0 as usize;
    (i / WORD, (i % WORD) as u32)
}

pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = State;

    #[inline]
    fn next(&mut self) -> Option<State> {
        loop {
            if self.current != 0 {
                let b = self.current.trailing_zeros();
                self.current &= self.current - 1;
                return Some(State((self.index * WORD) as u32 + b));
            }
            self.index += 1;
            self.current = *self.words.get(self.index)?;
        }
    }
}

impl<'a> IntoIterator for &'a StateSet {
    type Item = State;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl FromIterator<State> for StateSet {
    fn from_iter<I: IntoIterator<Item = State>>(iter: I) -> Self {
        let mut s = StateSet::new();
        for q in iter {
            s.insert(q);
        }
        s
    }
}

impl Extend<State> for StateSet {
    fn extend<I: IntoIterator<Item = State>>(&mut self, iter: I) {
        for q in iter {
            self.insert(q);
        }
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, q) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", q.0)?;
        }
        f.write_str("}")
    }
}

#[macro_export]
macro_rules! states {
    () => { $crate::StateSet::new() };
    ($($q:expr),+ $(,)?) => {
        [$($crate::State($q)),+].into_iter().collect::<$crate::StateSet>()
    };
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn normalized_equality() {
        let mut a = states![3, 100];
        a.remove(State(100));
        assert_eq!(a, states![3]);
        assert_eq!(a.last(), Some(State(3)));
        let mut e = states![70];
        e.intersect_with(&states![1]);
        assert!(e.is_empty());
        assert_eq!(e, StateSet::new());
    }

    #[test]
    fn display() {
        assert_eq!(alloc::format!("{}", states![0, 2]), "{0,2}");
        assert_eq!(alloc::format!("{}", states![]), "{}");
    }

    fn model() -> impl Strategy<Value = BTreeSet<u32>> {
        proptest::collection::btree_set(0u32..200, 0..20)
    }

    fn build(m: &BTreeSet<u32>) -> StateSet {
        m.iter().map(|&q| State(q)).collect()
    }

    proptest! {
        #[test]
        fn agrees_with_btreeset(a in model(), b in model()) {
            let (sa, sb) = (build(&a), build(&b));
            let u: BTreeSet<u32> = a.union(&b).copied().collect();
            let i: BTreeSet<u32> = a.intersection(&b).copied().collect();
            let d: BTreeSet<u32> = a.difference(&b).copied().collect();
            prop_assert_eq!(sa.union(&sb), build(&u));
            prop_assert_eq!(sa.intersection(&sb), build(&i));
            prop_assert_eq!(sa.difference(&sb), build(&d));
            prop_assert_eq!(sa.intersects(&sb), !i.is_empty());
            prop_assert_eq!(sa.is_subset(&sb), a.is_subset(&b));
            prop_assert_eq!(sa.len(), a.len());
            let back: Vec<u32> = sa.iter().map(|q| q.0).collect();
            prop_assert_eq!(back, a.iter().copied().collect::<Vec<_>>());
        }
    }
}
