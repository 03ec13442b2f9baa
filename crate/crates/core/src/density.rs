//! Hardest-instance densities.
//!
//! For uniformly random argument subsets `Q1, Q2 ⊆ Q` a fixed state lies in
//! `σ̄(Q1, Q2)` with probability `1 - (1 - d2/4)^(n²)` under the random
//! model. Setting this to ½ gives the peak density
//! `D_n = 4 (1 - 0.5^(1/n²))`; with `d0 = ½` nullary symbols hit each state
//! with probability ½ as well.

use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::Rng;

use crate::randgen::{generate, GenConfig, Seed};
use crate::stateset::StateSet;
use crate::{Error, RankedAlphabet, State};

/// `4 (1 - 0.5^(1/n²))`, defined for `n > 1`.
pub fn peak_density(n: usize) -> Result<f64, Error> {
    if n <= 1 {
        return Err(Error::Domain(n));
    }
    let nn = (n * n) as f64;
    Ok(4.0 * (1.0 - libm::pow(0.5, 1.0 / nn)))
}

/// `1 - (1 - d2/4)^(n²)`.
pub fn pi2(d2: f64, n: usize) -> f64 {
    1.0 - libm::pow(1.0 - d2 / 4.0, (n * n) as f64)
}

/// Probability that a nullary symbol reaches a fixed state.
pub fn pi0(d0: f64) -> f64 {
    d0
}

/// Rounds to `places` decimals with ties away from zero for positive input.
pub fn round_half_up(x: f64, places: i32) -> f64 {
    let scale = libm::pow(10.0, places as f64);
    libm::floor(x * scale + 0.5) / scale
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityPoint {
    pub n: usize,
    pub x: usize,
    pub d2: f64,
    pub d0: f64,
}

pub const DEFAULT_STEPS: usize = 40;

/// `steps + 1` densities `exp(x ln(D_n) / (steps / 2))`, `x = 0..=steps`.
///
/// Equally spaced on a log scale from 1 to `D_n²`, with `D_n` in the middle.
pub fn density_grid(n: usize, steps: usize) -> Result<Vec<DensityPoint>, Error> {
    let peak = peak_density(n)?;
    if steps == 0 || !steps.is_multiple_of(2) {
        return Err(Error::Config(alloc::format!(
            "steps must be a positive even number (got {steps})"
        )));
    }
    let half = (steps / 2) as f64;
    let log_peak = libm::log(peak);
    Ok((0..=steps)
        .map(|x| DensityPoint {
            n,
            x,
            d2: if x == steps / 2 {
                peak
            } else {
                libm::exp(x as f64 * log_peak / half)
            },
            d0: 0.5,
        })
        .collect())
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl Estimate {
    fn from_sums(sum: f64, sum_sq: f64, samples: u64) -> Self {
        let k = samples as f64;
        let mean = sum / k;
        let var = (sum_sq / k - mean * mean).max(0.0) * k / (k - 1.0).max(1.0);
        Self {
            mean,
            std_error: libm::sqrt(var / k),
            samples,
        }
    }
}

fn uniform_subset<R: Rng + ?Sized>(rng: &mut R, n: usize) -> StateSet {
    (1..=n as u32)
        .filter(|_| rng.random::<bool>())
        .map(State)
        .collect()
}

/// Monte-Carlo estimate of `π(q ∈ σ̄(Q1, Q2))`: each sample draws a fresh
/// random automaton and uniform subsets `Q1, Q2`, and records the fraction
/// of states in `σ̄(Q1, Q2)`.
pub fn estimate_pi2(n: usize, d2: f64, samples: u64, seed: Seed) -> Result<Estimate, Error> {
    let config = GenConfig::new(n, Arc::new(RankedAlphabet::setting_a()), d2);
    let sigma = config
        .alphabet
        .lookup("sigma")
        .expect("setting A has sigma");
    let mut rng = seed.stream(&[0x0070_6932, n as u64, d2.to_bits()]);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let m = generate(&config, &mut rng)?;
        let q1 = uniform_subset(&mut rng, n);
        let q2 = uniform_subset(&mut rng, n);
        let hit = m.sigma_bar(sigma, &[q1, q2])?.len() as f64 / n as f64;
        sum += hit;
        sum_sq += hit * hit;
    }
    Ok(Estimate::from_sums(sum, sum_sq, samples))
}

/// Monte-Carlo estimate of `π(q ∈ ᾱ)` at nullary density `d0`.
pub fn estimate_pi0(n: usize, d0: f64, samples: u64, seed: Seed) -> Result<Estimate, Error> {
    let config = GenConfig::new(n, Arc::new(RankedAlphabet::setting_a()), 0.0).with_d0(d0);
    let alpha = config
        .alphabet
        .lookup("alpha")
        .expect("setting A has alpha");
    let mut rng = seed.stream(&[0x0070_6930, n as u64, d0.to_bits()]);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let m = generate(&config, &mut rng)?;
        let hit = m.sigma_bar(alpha, &[])?.len() as f64 / n as f64;
        sum += hit;
        sum_sq += hit * hit;
    }
    Ok(Estimate::from_sums(sum, sum_sq, samples))
}
