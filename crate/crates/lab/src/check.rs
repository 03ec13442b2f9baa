//! Language agreement between an automaton and its constructions.

use std::sync::Arc;

use fta_core::randgen::{generate_trim, GenConfig, Seed};
use fta_core::{determinize, language_fingerprint, minimize, Fta};

use crate::experiment::{ExperimentError, Setting};

pub const CHECK_DENSITIES: [f64; 8] = [0.05, 0.1, 0.2, 0.3, 0.45, 0.6, 0.8, 1.0];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub checked: usize,
    /// Case indices whose fingerprints disagree.
    pub mismatches: Vec<usize>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// The trim automaton used for case `i`: sizes cycle through `1..=max_n`
/// and densities through [`CHECK_DENSITIES`].
pub fn check_case(
    setting: Setting,
    max_n: usize,
    i: usize,
    seed: Seed,
) -> Result<Fta, ExperimentError> {
    let n = 1 + i % max_n;
    let d2 = CHECK_DENSITIES[(i / max_n) % CHECK_DENSITIES.len()];
    let config = GenConfig::new(n, Arc::new(setting.alphabet()), d2).with_max_attempts(1 << 24);
    Ok(generate_trim(&config, seed, i as u64)?.fta)
}

/// Compares the accepted trees up to `height` of `M`, `determinize(M)` and
/// `minimize(determinize(M))` over `cases` random trim automata.
pub fn oracle_check(
    setting: Setting,
    cases: usize,
    max_n: usize,
    height: usize,
    seed: u64,
) -> Result<CheckReport, ExperimentError> {
    if max_n == 0 {
        return Err(ExperimentError::Config("max_n must be positive".into()));
    }
    let seed = Seed(seed).derive(&[0xc4ec]);
    let mut mismatches = Vec::new();
    for i in 0..cases {
        let m = check_case(setting, max_n, i, seed)?;
        let d = determinize(&m);
        let c = minimize(d.dta());
        let expect = language_fingerprint(&m, height)?;
        if language_fingerprint(d.dta(), height)? != expect
            || language_fingerprint(&c, height)? != expect
        {
            mismatches.push(i);
        }
    }
    Ok(CheckReport {
        checked: cases,
        mismatches,
    })
}
