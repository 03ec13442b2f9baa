//! Odometer helpers for argument tuples of arbitrary rank.

/// Steps `idx` to the next tuple in `[0, bound)^len`, last position fastest.
/// Returns `false` after the last tuple (leaving `idx` all zero).
pub(crate) fn advance(idx: &mut [usize], bound: usize) -> bool {
    for p in (0..idx.len()).rev() {
        idx[p] += 1;
        if idx[p] < bound {
            return true;
        }
        idx[p] = 0;
    }
    false
}

/// Calls `f` on every tuple in `[0, m]^rank` that contains `m`, in
/// lexicographic order. `rank` must be at least 1.
pub(crate) fn for_each_with_max(rank: usize, m: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = alloc::vec![0usize; rank];
    loop {
        if idx.contains(&m) {
            f(&idx);
        }
        if !advance(&mut idx, m + 1) {
            break;
        }
    }
}
