use alloc::sync::Arc;
use alloc::vec;

use crate::{states, Fta, RankedAlphabet, Transition, Tree};

/// α→0, α→2, σ(0,0)→1, σ(1,0)→1, σ(1,2)→3, σ(1,3)→3 with F = {3}.
pub fn m_ex() -> Fta {
    let a = Arc::new(RankedAlphabet::setting_a());
    let alpha = a.lookup("alpha").unwrap();
    let sigma = a.lookup("sigma").unwrap();
    Fta::new(
        a,
        states![0, 1, 2, 3],
        states![3],
        vec![
            Transition::new(alpha, &[], 0),
            Transition::new(alpha, &[], 2),
            Transition::new(sigma, &[0, 0], 1),
            Transition::new(sigma, &[1, 0], 1),
            Transition::new(sigma, &[1, 2], 3),
            Transition::new(sigma, &[1, 3], 3),
        ],
    )
    .unwrap()
}

pub fn parse(m: &Fta, text: &str) -> Tree {
    Tree::parse(m.alphabet(), text).unwrap()
}
