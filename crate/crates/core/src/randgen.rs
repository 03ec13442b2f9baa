//! Random FTAs with independent Bernoulli transitions.
//!
//! For `Q = {1..n}` every state is final with probability `final_prob`,
//! every nullary candidate `α → q` is a transition with probability `d0`
//! and every binary candidate `σ(q1, q2) → q` with probability `d2`.
//!
//! # Draw order
//!
//! Draws come from a [`Stream`] in this fixed order, so a seed replays the
//! same automaton everywhere:
//!
//! 1. finals: one coin with probability `final_prob` per state `1..=n`;
//! 2. nullary candidates ordered by (symbol, q), one coin with probability
//!    `d0` each;
//! 3. binary candidates ordered by (symbol, q1, q2, q).
//!
//! A run of coins with probability exactly ½ uses one bit per coin from
//! successive `u64` words (least significant bit first); other
//! probabilities use one uniform `f64` per coin, heads iff `u < p`.
//!
//! The `|Σ₂|·n³` binary candidates are sampled by geometric skipping: from
//! the current position, one uniform `u` gives the number of excluded
//! candidates before the next included one, `floor(ln(1 - u) / ln(1 - d2))`.
//! This has exactly the distribution of independent per-candidate coins but
//! costs one draw per *included* transition, which matters at the sparse
//! end of the density range where trim automata are rare and many attempts
//! are needed. `d2 = 1` includes every candidate without drawing and
//! `d2 = 0` draws nothing.
//!
//! # Streams
//!
//! [`Seed::stream`] derives an independent ChaCha8 stream from the master
//! seed and a key. [`generate_trim`] uses one stream per trial and consumes
//! it attempt after attempt; [`trim_ratio`] uses one stream per raw draw.

use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alphabet::{RankedAlphabet, Symbol};
use crate::fta::{Fta, State, Transition};
use crate::stateset::StateSet;
use crate::trim::is_trim_parts;
use crate::Error;

pub const DEFAULT_MAX_ATTEMPTS: u64 = 10_000;

/// Random stream used by the generator.
pub type Stream = ChaCha8Rng;

const TAG_TRIM: u64 = 0x7472_696d;
const TAG_RAW: u64 = 0x7261_7764;

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub n: usize,
    pub alphabet: Arc<RankedAlphabet>,
    pub d2: f64,
    pub d0: f64,
    pub final_prob: f64,
    pub max_attempts: u64,
}

impl GenConfig {
    /// `d0 = final_prob = 1/2` and the default attempt limit.
    pub fn new(n: usize, alphabet: Arc<RankedAlphabet>, d2: f64) -> Self {
        Self {
            n,
            alphabet,
            d2,
            d0: 0.5,
            final_prob: 0.5,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
        }
    }

    pub fn with_d0(mut self, d0: f64) -> Self {
        self.d0 = d0;
        self
    }

    pub fn with_final_prob(mut self, p: f64) -> Self {
        self.final_prob = p;
        self
    }

    pub fn with_max_attempts(mut self, attempts: u64) -> Self {
        self.max_attempts = attempts;
        self
    }

    pub fn validate(&self) -> Result<(), Error> {
        use alloc::format;
        if self.n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if self.n >= 1 << 20 {
            return Err(Error::Config(format!("n = {} is too large", self.n)));
        }
        for (name, p) in [
            ("d2", self.d2),
            ("d0", self.d0),
            ("final_prob", self.final_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} = {p} is not a probability")));
            }
        }
        if self.max_attempts == 0 {
            return Err(Error::Config("max_attempts must be positive".into()));
        }
        self.alphabet.require_binary()
    }

    fn key(&self, tag: u64, index: u64) -> [u64; 6] {
        [
            tag,
            self.n as u64,
            self.d2.to_bits(),
            self.d0.to_bits(),
            self.final_prob.to_bits(),
            index,
        ]
    }
}

/// Master seed of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Seed(pub u64);

impl Seed {
    /// An independent stream for `key`.
    pub fn stream(self, key: &[u64]) -> Stream {
        ChaCha8Rng::seed_from_u64(self.derive(key).0)
    }

    /// A seed for an independent sub-experiment named by `key`.
    pub fn derive(self, key: &[u64]) -> Seed {
        let mut h = splitmix64(self.0);
        for &k in key {
            h = splitmix64(h ^ splitmix64(k.wrapping_add(0x632b_e59b_d9b4_e019)));
        }
        Seed(h)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Calls `include(i)` for the included candidates `i < len`, each included
/// independently with probability `p`; `log_q` is `ln(1 - p)`.
fn bernoulli_run<R: Rng + ?Sized>(
    rng: &mut R,
    p: f64,
    log_q: f64,
    len: usize,
    mut include: impl FnMut(usize),
) {
    if p <= 0.0 || len == 0 {
        return;
    }
    if p >= 1.0 {
        (0..len).for_each(include);
        return;
    }
    let mut i = 0usize;
    loop {
        let u: f64 = rng.random();
        let gap = libm::floor(libm::log1p(-u) / log_q);
        if gap >= (len - i) as f64 {
            return;
        }
        i += gap as usize;
        include(i);
        i += 1;
        if i >= len {
            return;
        }
    }
}

/// Calls `include(i)` for each `i < len` whose coin with probability `p`
/// comes up. `p = ½` takes one bit per coin from successive `u64` words,
/// least significant first; other `p` in `(0, 1)` take one `f64` per coin,
/// included iff `u < p`. `p ≤ 0` and `p ≥ 1` draw nothing.
fn coin_run<R: Rng + ?Sized>(rng: &mut R, p: f64, len: usize, mut include: impl FnMut(usize)) {
    if p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        (0..len).for_each(include);
    } else if p == 0.5 {
        let mut word = 0u64;
        for i in 0..len {
            if i % 64 == 0 {
                word = rng.next_u64();
            }
            if word >> (i % 64) & 1 == 1 {
                include(i);
            }
        }
    } else {
        for i in 0..len {
            if rng.random::<f64>() < p {
                include(i);
            }
        }
    }
}

/// Reusable buffers for one draw of the generation model.
///
/// States are `1..=n`; while `n < 64` the trimness test runs on bit masks.
struct Draw {
    n: usize,
    finals: Vec<u32>,
    nullary: Vec<(Symbol, u32)>,
    binary: Vec<(Symbol, u32, u32, u32)>,
    nullary_symbols: Vec<Symbol>,
    binary_symbols: Vec<Symbol>,
    log_q: f64,
}

impl Draw {
    fn new(config: &GenConfig) -> Self {
        Self {
            n: config.n,
            finals: Vec::new(),
            nullary: Vec::new(),
            binary: Vec::new(),
            nullary_symbols: config.alphabet.symbols_of_rank(0).collect(),
            binary_symbols: config.alphabet.symbols_of_rank(2).collect(),
            log_q: libm::log1p(-config.d2),
        }
    }

    fn fill<R: Rng + ?Sized>(&mut self, config: &GenConfig, rng: &mut R) {
        let n = self.n;
        self.finals.clear();
        self.nullary.clear();
        self.binary.clear();
        let finals = &mut self.finals;
        coin_run(rng, config.final_prob, n, |i| finals.push(i as u32 + 1));
        let (symbols, nullary) = (&self.nullary_symbols, &mut self.nullary);
        coin_run(rng, config.d0, symbols.len() * n, |c| {
            nullary.push((symbols[c / n], (c % n) as u32 + 1));
        });
        let (symbols, binary) = (&self.binary_symbols, &mut self.binary);
        let n2 = n * n;
        let n3 = n2 * n;
        bernoulli_run(rng, config.d2, self.log_q, symbols.len() * n3, |c| {
            let r = c % n3;
            binary.push((
                symbols[c / n3],
                (r / n2) as u32 + 1,
                (r / n % n) as u32 + 1,
                (r % n) as u32 + 1,
            ));
        });
    }

    fn is_trim(&self) -> bool {
        if self.n >= 64 {
            let transitions = self.transitions();
            return is_trim_parts(
                &StateSet::range(1, self.n as u32),
                &self.finals(),
                &transitions,
            );
        }
        let all = (u64::MAX >> (63 - self.n)) & !1;
        let mut reach = self.nullary.iter().fold(0u64, |m, &(_, q)| m | 1 << q);
        let targets = self
            .binary
            .iter()
            .fold(reach, |m, &(_, _, _, q)| m | 1 << q);
        if targets != all {
            return false;
        }
        loop {
            let before = reach;
            for &(_, q1, q2, q) in &self.binary {
                if reach >> q1 & reach >> q2 & 1 == 1 {
                    reach |= 1 << q;
                }
            }
            if reach == before {
                break;
            }
        }
        if reach != all {
            return false;
        }
        // every state is reachable, so any transition extends a context
        let mut co = self.finals.iter().fold(0u64, |m, &q| m | 1 << q);
        loop {
            let before = co;
            for &(_, q1, q2, q) in &self.binary {
                if co >> q & 1 == 1 {
                    co |= 1 << q1 | 1 << q2;
                }
            }
            if co == before {
                break;
            }
        }
        co == all
    }

    fn finals(&self) -> StateSet {
        self.finals.iter().map(|&q| State(q)).collect()
    }

    fn transitions(&self) -> Vec<Transition> {
        let nullary = self.nullary.iter().map(|&(s, q)| Transition {
            symbol: s,
            args: Default::default(),
            target: State(q),
        });
        let binary = self.binary.iter().map(|&(s, q1, q2, q)| Transition {
            symbol: s,
            args: [State(q1), State(q2)].into_iter().collect(),
            target: State(q),
        });
        nullary.chain(binary).collect()
    }

    fn to_fta(&self, config: &GenConfig) -> Fta {
        let mut transitions = self.transitions();
        transitions.sort_unstable();
        Fta::from_parts(
            config.alphabet.clone(),
            StateSet::range(1, self.n as u32),
            self.finals(),
            transitions,
        )
    }
}

/// One raw draw of the generation model (no trimness requirement).
pub fn generate<R: Rng + ?Sized>(config: &GenConfig, rng: &mut R) -> Result<Fta, Error> {
    config.validate()?;
    let mut draw = Draw::new(config);
    draw.fill(config, rng);
    Ok(draw.to_fta(config))
}

/// The raw draw number `index` of `trim_ratio`'s sample.
pub fn generate_indexed(config: &GenConfig, seed: Seed, index: u64) -> Result<Fta, Error> {
    generate(config, &mut seed.stream(&config.key(TAG_RAW, index)))
}

/// A trim automaton and the number of draws it took.
#[derive(Debug, Clone, PartialEq)]
pub struct TrimSample {
    pub fta: Fta,
    pub attempts: u64,
}

/// Draws from the trial's stream until the automaton is trim.
pub fn generate_trim(config: &GenConfig, seed: Seed, trial: u64) -> Result<TrimSample, Error> {
    config.validate()?;
    let mut rng = seed.stream(&config.key(TAG_TRIM, trial));
    let mut draw = Draw::new(config);
    for attempt in 1..=config.max_attempts {
        draw.fill(config, &mut rng);
        if draw.is_trim() {
            return Ok(TrimSample {
                fta: draw.to_fta(config),
                attempts: attempt,
            });
        }
    }
    Err(Error::Exhausted {
        n: config.n,
        d2: config.d2,
        attempts: config.max_attempts,
    })
}

/// Whether raw draw `index` is trim, without building the automaton.
pub fn is_trim_draw(config: &GenConfig, seed: Seed, index: u64) -> Result<bool, Error> {
    config.validate()?;
    let mut rng = seed.stream(&config.key(TAG_RAW, index));
    let mut draw = Draw::new(config);
    draw.fill(config, &mut rng);
    Ok(draw.is_trim())
}

/// Fraction of trim automata in a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrimRatio {
    pub trials: u64,
    pub trim: u64,
}

impl TrimRatio {
    pub fn ratio(&self) -> f64 {
        self.trim as f64 / self.trials as f64
    }

    /// Half-width of the normal-approximation 95% binomial interval.
    pub fn half_width(&self) -> f64 {
        let p = self.ratio();
        1.96 * libm::sqrt(p * (1.0 - p) / self.trials as f64)
    }
}

/// Trim fraction over raw draws `0..trials`.
pub fn trim_ratio(config: &GenConfig, trials: u64, seed: Seed) -> Result<TrimRatio, Error> {
    if trials == 0 {
        return Err(Error::Config(alloc::string::String::from(
            "trials must be positive",
        )));
    }
    let mut trim = 0;
    for i in 0..trials {
        trim += u64::from(is_trim_draw(config, seed, i)?);
    }
    Ok(TrimRatio { trials, trim })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trim::is_trim;

    fn setting_a() -> Arc<RankedAlphabet> {
        Arc::new(RankedAlphabet::setting_a())
    }

    #[test]
    fn forced_draws() {
        let config = GenConfig::new(2, setting_a(), 1.0)
            .with_d0(1.0)
            .with_final_prob(1.0);
        let m = generate(&config, &mut Seed(1).stream(&[])).unwrap();
        assert_eq!(m.transitions().len(), 2 + 8);
        assert_eq!(m.finals().len(), 2);
        assert!(is_trim(&m));

        let empty = GenConfig::new(3, setting_a(), 0.0).with_d0(0.0);
        let m = generate(&empty, &mut Seed(1).stream(&[])).unwrap();
        assert!(m.transitions().is_empty());
        assert_eq!(m.size(), 3);
    }

    #[test]
    fn binary_count_statistics() {
        // Binomial(125, 1/2) per draw: mean 62.5, sd sqrt(31.25).
        let config = GenConfig::new(5, setting_a(), 0.5);
        let mut rng = Seed(99).stream(&[1]);
        let draws = 1000;
        let mut total = 0usize;
        let sigma = config.alphabet.lookup("sigma").unwrap();
        for _ in 0..draws {
            total += generate(&config, &mut rng)
                .unwrap()
                .transitions_of(sigma)
                .len();
        }
        let mean = total as f64 / draws as f64;
        let se = libm::sqrt(31.25 / draws as f64);
        assert!((mean - 62.5).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn inclusion_frequencies() {
        for (d2, d0) in [(0.03, 0.5), (0.2, 0.1), (0.7, 0.9)] {
            let config = GenConfig::new(4, setting_a(), d2).with_d0(d0);
            let mut rng = Seed(5).stream(&[d2.to_bits()]);
            let draws = 2000u64;
            let (mut bin, mut nul, mut fin) = (0u64, 0u64, 0u64);
            for _ in 0..draws {
                let m = generate(&config, &mut rng).unwrap();
                fin += m.finals().len() as u64;
                for t in m.transitions() {
                    if t.args.is_empty() {
                        nul += 1;
                    } else {
                        bin += 1;
                    }
                }
            }
            let check = |hits: u64, cands: u64, p: f64| {
                let freq = hits as f64 / cands as f64;
                let se = libm::sqrt(p * (1.0 - p) / cands as f64);
                assert!((freq - p).abs() < 3.0 * se, "{freq} vs {p}");
            };
            check(bin, draws * 64, d2);
            check(nul, draws * 4, d0);
            check(fin, draws * 4, 0.5);
        }
    }

    #[test]
    fn replayable() {
        let config = GenConfig::new(6, Arc::new(RankedAlphabet::setting_b()), 0.07);
        let a = generate_trim(&config, Seed(42), 3).unwrap();
        let b = generate_trim(&config, Seed(42), 3).unwrap();
        assert_eq!(a, b);
        assert!(is_trim(&a.fta));
        assert_eq!(a.fta.size(), 6);
        let c = generate_trim(&config, Seed(42), 4).unwrap();
        assert_ne!(a.fta, c.fta);
    }

    #[test]
    fn exhaustion_names_the_point() {
        let config = GenConfig::new(3, setting_a(), 0.5)
            .with_d0(0.0)
            .with_max_attempts(7);
        assert_eq!(
            generate_trim(&config, Seed(0), 0),
            Err(Error::Exhausted {
                n: 3,
                d2: 0.5,
                attempts: 7
            })
        );
    }

    #[test]
    fn ratio_extremes() {
        let full = GenConfig::new(3, setting_a(), 1.0)
            .with_d0(1.0)
            .with_final_prob(1.0);
        assert_eq!(trim_ratio(&full, 50, Seed(1)).unwrap().ratio(), 1.0);
        let dead = GenConfig::new(3, setting_a(), 0.4).with_d0(0.0);
        assert_eq!(trim_ratio(&dead, 50, Seed(1)).unwrap().ratio(), 0.0);
        assert!(trim_ratio(&dead, 0, Seed(1)).is_err());
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = GenConfig::new(3, setting_a(), 1.5);
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let unary = Arc::new(RankedAlphabet::new([("a", 0), ("g", 1)]).unwrap());
        assert_eq!(
            GenConfig::new(3, unary, 0.1).validate(),
            Err(Error::NonBinaryAlphabet(1))
        );
        assert!(GenConfig::new(0, setting_a(), 0.1).validate().is_err());
    }

    #[test]
    fn indexed_draw_matches_trim_flag() {
        let mut trim = 0;
        for (n, d2, d0) in [
            (4, 0.17, 0.5),
            (3, 0.3, 0.7),
            (2, 0.5, 0.5),
            (70, 2e-4, 0.99),
        ] {
            let config = GenConfig::new(n, setting_a(), d2)
                .with_d0(d0)
                .with_final_prob(d0);
            for i in 0..60 {
                let m = generate_indexed(&config, Seed(8), i).unwrap();
                let flag = is_trim_draw(&config, Seed(8), i).unwrap();
                assert_eq!(is_trim(&m), flag);
                trim += usize::from(flag);
            }
        }
        assert!(trim > 20);
    }
}
