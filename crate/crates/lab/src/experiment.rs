//! Density sweeps over random trim automata.
//!
//! For each grid density a number of trim automata is generated,
//! determinized and minimized. The size-weighted distribution of log
//! density is summarised by its mean and spread ([`fit_peak`]).
//!
//! Every trial draws from its own stream, keyed by the master seed, the
//! setting, the point and the trial index, so results do not depend on how
//! many workers run them or in which order.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use fta_core::density::{density_grid, peak_density};
use fta_core::randgen::{generate_trim, is_trim_draw, GenConfig, Seed, TrimRatio};
use fta_core::{det_size, determinize_bounded, minimize, RankedAlphabet};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Model(#[from] fta_core::Error),
    #[error("peak fit needs at least 3 points with positive weight (got {0})")]
    Fit(usize),
    #[error("invalid experiment setup: {0}")]
    Config(String),
}

/// The two binary alphabets: `A = {alpha/0, sigma/2}` and `B` with an
/// extra `delta/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Setting {
    A,
    B,
}

impl Setting {
    pub fn alphabet(self) -> RankedAlphabet {
        match self {
            Setting::A => RankedAlphabet::setting_a(),
            Setting::B => RankedAlphabet::setting_b(),
        }
    }

    fn key(self) -> u64 {
        match self {
            Setting::A => 0xa,
            Setting::B => 0xb,
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Setting::A => "A",
            Setting::B => "B",
        })
    }
}

impl FromStr for Setting {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(Setting::A),
            "B" | "b" => Ok(Setting::B),
            _ => Err(ExperimentError::Config(format!("unknown setting `{s}`"))),
        }
    }
}

/// Which size series weights the peak fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weights {
    Determinized,
    Canonical,
}

/// Scale of the interval around the fitted log-density mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalScale {
    /// `mu ± 1.96 sigma`.
    StdDev,
    /// `mu ± 1.96 sigma / sqrt(k)` over the `k` positively weighted points.
    StdError,
}

/// Sweeps need far more attempts than single draws: at the sparse end of
/// the grid only about one draw in a million is trim for n = 12.
pub const SWEEP_MAX_ATTEMPTS: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub trials: usize,
    pub steps: usize,
    pub seed: u64,
    /// Worker threads; 0 uses the thread pool default.
    pub workers: usize,
    pub d0: f64,
    pub final_prob: f64,
    pub max_attempts: u64,
    /// Subset states allowed per determinization; `None` means `2^n`.
    pub subset_budget: Option<usize>,
    pub weights: Weights,
    pub scale: IntervalScale,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            trials: 40,
            steps: fta_core::density::DEFAULT_STEPS,
            seed: 1,
            workers: 0,
            d0: 0.5,
            final_prob: 0.5,
            max_attempts: SWEEP_MAX_ATTEMPTS,
            subset_budget: None,
            weights: Weights::Determinized,
            scale: IntervalScale::StdError,
        }
    }
}

impl ExperimentConfig {
    fn validate(&self, n: usize) -> Result<(), ExperimentError> {
        if self.trials == 0 {
            return Err(ExperimentError::Config("trials must be positive".into()));
        }
        if n < 2 {
            return Err(ExperimentError::Config(format!(
                "n must be at least 2 (got {n})"
            )));
        }
        if n > 13 && self.subset_budget.is_none() {
            return Err(ExperimentError::Config(format!(
                "n = {n} needs an explicit subset budget"
            )));
        }
        Ok(())
    }

    fn budget(&self, n: usize) -> usize {
        self.subset_budget.unwrap_or(if n < usize::BITS as usize {
            1 << n
        } else {
            usize::MAX
        })
    }

    fn gen(&self, setting: Setting, n: usize, d2: f64) -> GenConfig {
        GenConfig::new(n, Arc::new(setting.alphabet()), d2)
            .with_d0(self.d0)
            .with_final_prob(self.final_prob)
            .with_max_attempts(self.max_attempts)
    }

    /// Runs `f` on a pool with the configured number of workers.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> Result<R, ExperimentError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| ExperimentError::Config(e.to_string()))?;
        Ok(pool.install(f))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialRecord {
    pub attempts: u64,
    pub det_size: usize,
    pub canonical_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointRecord {
    pub setting: Setting,
    pub n: usize,
    /// Grid index when the point belongs to a sweep.
    pub x: Option<usize>,
    pub d2: f64,
    pub trials: Vec<TrialRecord>,
    pub seed: u64,
}

impl PointRecord {
    pub fn trim_attempts(&self) -> u64 {
        self.trials.iter().map(|t| t.attempts).sum()
    }

    pub fn mean_det_size(&self) -> f64 {
        mean(self.trials.iter().map(|t| t.det_size))
    }

    pub fn mean_canonical_size(&self) -> f64 {
        mean(self.trials.iter().map(|t| t.canonical_size))
    }

    pub fn mean_size(&self, weights: Weights) -> f64 {
        match weights {
            Weights::Determinized => self.mean_det_size(),
            Weights::Canonical => self.mean_canonical_size(),
        }
    }
}

fn mean(xs: impl ExactSizeIterator<Item = usize>) -> f64 {
    let k = xs.len();
    xs.sum::<usize>() as f64 / k as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakFit {
    /// Weighted mean of `ln d2`.
    pub mu: f64,
    /// Weighted standard deviation of `ln d2`.
    pub sigma: f64,
    /// The interval half-width divided by 1.96.
    pub scale: f64,
    pub observed_peak: f64,
    pub lo: f64,
    pub hi: f64,
}

impl PeakFit {
    pub fn contains(&self, d2: f64) -> bool {
        self.lo <= d2 && d2 <= self.hi
    }

    pub fn overlaps(&self, other: &PeakFit) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

/// Fits the size-weighted log-density distribution of `(density, weight)`
/// pairs.
pub fn fit_peak(points: &[(f64, f64)], scale: IntervalScale) -> Result<PeakFit, ExperimentError> {
    let used: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(d, w)| w > 0.0 && d > 0.0)
        .map(|&(d, w)| (d.ln(), w))
        .collect();
    if used.len() < 3 {
        return Err(ExperimentError::Fit(used.len()));
    }
    let total: f64 = used.iter().map(|&(_, w)| w).sum();
    let mu = used.iter().map(|&(x, w)| w * x).sum::<f64>() / total;
    let var = used.iter().map(|&(x, w)| w * (x - mu).powi(2)).sum::<f64>() / total;
    let sigma = var.sqrt();
    let scale = match scale {
        IntervalScale::StdDev => sigma,
        IntervalScale::StdError => sigma / (used.len() as f64).sqrt(),
    };
    Ok(PeakFit {
        mu,
        sigma,
        scale,
        observed_peak: mu.exp(),
        lo: (mu - 1.96 * scale).exp(),
        hi: (mu + 1.96 * scale).exp(),
    })
}

fn run_trial(
    config: &GenConfig,
    seed: Seed,
    trial: u64,
    budget: usize,
) -> Result<TrialRecord, ExperimentError> {
    let sample = generate_trim(config, seed, trial)?;
    let dfta = determinize_bounded(&sample.fta, budget)?;
    Ok(TrialRecord {
        attempts: sample.attempts,
        det_size: det_size(&dfta),
        canonical_size: minimize(&dfta).size(),
    })
}

fn run_points(
    setting: Setting,
    n: usize,
    points: &[(Option<usize>, f64)],
    cfg: &ExperimentConfig,
) -> Result<Vec<PointRecord>, ExperimentError> {
    cfg.validate(n)?;
    let seed = Seed(cfg.seed).derive(&[setting.key()]);
    let configs: Vec<GenConfig> = points
        .iter()
        .map(|&(_, d2)| cfg.gen(setting, n, d2))
        .collect();
    for c in &configs {
        c.validate()?;
    }
    let budget = cfg.budget(n);
    let work: Vec<(usize, u64)> = (0..points.len())
        .flat_map(|p| (0..cfg.trials as u64).map(move |t| (p, t)))
        .collect();
    let results: Vec<TrialRecord> = cfg.install(|| {
        work.par_iter()
            .map(|&(p, t)| run_trial(&configs[p], seed, t, budget))
            .collect::<Result<_, _>>()
    })??;
    Ok(points
        .iter()
        .zip(results.chunks(cfg.trials))
        .map(|(&(x, d2), trials)| PointRecord {
            setting,
            n,
            x,
            d2,
            trials: trials.to_vec(),
            seed: cfg.seed,
        })
        .collect())
}

/// Trim automata at one density, determinized and minimized.
pub fn run_point(
    setting: Setting,
    n: usize,
    d2: f64,
    cfg: &ExperimentConfig,
) -> Result<PointRecord, ExperimentError> {
    Ok(run_points(setting, n, &[(None, d2)], cfg)?.remove(0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub setting: Setting,
    pub n: usize,
    pub points: Vec<PointRecord>,
    pub fit: PeakFit,
}

impl Sweep {
    /// The fit over another size series or interval scale.
    pub fn refit(
        &self,
        weights: Weights,
        scale: IntervalScale,
    ) -> Result<PeakFit, ExperimentError> {
        fit_peak(&series(&self.points, weights), scale)
    }

    /// The grid point at the predicted peak density.
    pub fn midpoint(&self) -> &PointRecord {
        &self.points[self.points.len() / 2]
    }
}

fn series(points: &[PointRecord], weights: Weights) -> Vec<(f64, f64)> {
    points
        .iter()
        .map(|p| (p.d2, p.mean_size(weights)))
        .collect()
}

/// One point per grid density, then the peak fit.
pub fn run_sweep(
    setting: Setting,
    n: usize,
    cfg: &ExperimentConfig,
) -> Result<Sweep, ExperimentError> {
    let grid: Vec<(Option<usize>, f64)> = density_grid(n, cfg.steps)?
        .into_iter()
        .map(|p| (Some(p.x), p.d2))
        .collect();
    let points = run_points(setting, n, &grid, cfg)?;
    let fit = fit_peak(&series(&points, cfg.weights), cfg.scale)?;
    Ok(Sweep {
        setting,
        n,
        points,
        fit,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityRow {
    pub n: usize,
    pub expected: f64,
    pub std_dev: PeakFit,
    pub std_error: PeakFit,
}

impl DensityRow {
    pub fn fit(&self, scale: IntervalScale) -> &PeakFit {
        match scale {
            IntervalScale::StdDev => &self.std_dev,
            IntervalScale::StdError => &self.std_error,
        }
    }

    pub fn contains_expected(&self, scale: IntervalScale) -> bool {
        self.fit(scale).contains(self.expected)
    }
}

/// Predicted and observed peak densities for each `n`, with the sweeps.
pub fn table_densities(
    setting: Setting,
    ns: &[usize],
    cfg: &ExperimentConfig,
) -> Result<Vec<(DensityRow, Sweep)>, ExperimentError> {
    ns.iter()
        .map(|&n| {
            let sweep = run_sweep(setting, n, cfg)?;
            let row = DensityRow {
                n,
                expected: peak_density(n)?,
                std_dev: sweep.refit(cfg.weights, IntervalScale::StdDev)?,
                std_error: sweep.refit(cfg.weights, IntervalScale::StdError)?,
            };
            Ok((row, sweep))
        })
        .collect()
}

/// The densities and sizes of the trim-ratio table.
pub const TRIM_DENSITIES: [f64; 5] = [0.01, 0.05, 0.10, 0.25, 0.50];
pub const TRIM_SIZES: [usize; 10] = [2, 4, 6, 7, 8, 9, 10, 11, 12, 13];

/// Reference trim percentages on the `TRIM_DENSITIES × TRIM_SIZES` grid;
/// `None` marks cells without a reference value.
pub const REFERENCE_TRIM_PERCENT: [[Option<u8>; 10]; 5] = [
    [
        None,
        None,
        None,
        Some(7),
        Some(11),
        Some(18),
        Some(27),
        Some(38),
        Some(50),
        Some(64),
    ],
    [
        None,
        None,
        Some(68),
        Some(82),
        Some(92),
        Some(98),
        Some(99),
        Some(100),
        Some(100),
        Some(100),
    ],
    [
        None,
        Some(54),
        Some(90),
        Some(96),
        Some(99),
        Some(99),
        Some(100),
        Some(100),
        Some(100),
        Some(100),
    ],
    [
        None,
        Some(83),
        Some(97),
        Some(98),
        Some(99),
        Some(100),
        Some(100),
        Some(100),
        Some(100),
        Some(100),
    ],
    [
        Some(47),
        Some(88),
        Some(96),
        Some(98),
        Some(100),
        Some(100),
        Some(100),
        Some(100),
        Some(100),
        Some(100),
    ],
];

pub fn reference_trim_percent(d2: f64, n: usize) -> Option<u8> {
    let row = TRIM_DENSITIES.iter().position(|&d| d == d2)?;
    let col = TRIM_SIZES.iter().position(|&m| m == n)?;
    REFERENCE_TRIM_PERCENT[row][col]
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrimCell {
    pub d2: f64,
    pub n: usize,
    pub ratio: TrimRatio,
    pub reference: Option<u8>,
}

/// The standard grid cells: those with a reference value, or all of them.
pub fn trim_cells(include_blank: bool) -> Vec<(f64, usize)> {
    TRIM_DENSITIES
        .iter()
        .flat_map(|&d2| TRIM_SIZES.iter().map(move |&n| (d2, n)))
        .filter(|&(d2, n)| include_blank || reference_trim_percent(d2, n).is_some())
        .collect()
}

/// Fraction of trim automata among `draws` raw draws per cell.
pub fn table_trim(
    setting: Setting,
    cells: &[(f64, usize)],
    draws: u64,
    cfg: &ExperimentConfig,
) -> Result<Vec<TrimCell>, ExperimentError> {
    if draws == 0 {
        return Err(ExperimentError::Config("draws must be positive".into()));
    }
    let seed = Seed(cfg.seed).derive(&[setting.key(), 0x7472]);
    let configs: Vec<GenConfig> = cells
        .iter()
        .map(|&(d2, n)| cfg.gen(setting, n, d2))
        .collect();
    for c in &configs {
        c.validate()?;
    }
    let work: Vec<(usize, u64)> = (0..cells.len())
        .flat_map(|c| (0..draws).map(move |i| (c, i)))
        .collect();
    let flags: Vec<bool> = cfg.install(|| {
        work.par_iter()
            .map(|&(c, i)| is_trim_draw(&configs[c], seed, i))
            .collect::<Result<_, _>>()
    })??;
    Ok(cells
        .iter()
        .zip(flags.chunks(draws as usize))
        .map(|(&(d2, n), flags)| TrimCell {
            d2,
            n,
            ratio: TrimRatio {
                trials: draws,
                trim: flags.iter().filter(|&&f| f).count() as u64,
            },
            reference: reference_trim_percent(d2, n),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SettingsComparison {
    pub a: Sweep,
    pub b: Sweep,
}

impl SettingsComparison {
    pub fn peaks_overlap(&self) -> bool {
        self.a.fit.overlaps(&self.b.fit)
    }

    /// Mean determinized sizes of A and B at the predicted peak density.
    pub fn det_sizes_at_peak(&self) -> (f64, f64) {
        (
            self.a.midpoint().mean_det_size(),
            self.b.midpoint().mean_det_size(),
        )
    }

    pub fn b_larger_at_peak(&self) -> bool {
        let (a, b) = self.det_sizes_at_peak();
        b > a
    }
}

/// Sweeps both settings at the same `n` and seed.
pub fn compare_settings(
    n: usize,
    cfg: &ExperimentConfig,
) -> Result<SettingsComparison, ExperimentError> {
    Ok(SettingsComparison {
        a: run_sweep(Setting::A, n, cfg)?,
        b: run_sweep(Setting::B, n, cfg)?,
    })
}
