use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};

use fta_core::density::{peak_density, DEFAULT_STEPS};
use fta_core::randgen::{generate_indexed, generate_trim, GenConfig, Seed};
use fta_core::{determinize_bounded, minimize, Error, Fta};
use fta_lab::check::oracle_check;
use fta_lab::experiment::{
    run_sweep, table_densities, table_trim, trim_cells, ExperimentConfig, ExperimentError,
    IntervalScale, Setting, Weights, SWEEP_MAX_ATTEMPTS,
};
use fta_lab::io::{format_fta, parse_fta, ParseError};
use fta_lab::report;

#[derive(Parser)]
#[command(
    name = "fta",
    version,
    about = "Random tree automata: generation, determinization, density sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a random automaton
    Generate(GenerateArgs),
    /// Subset construction; prints the determinized size
    Determinize(FileArgs),
    /// Determinize and minimize; prints the canonical size
    Minimize(FileArgs),
    /// Generate, determinize and minimize; prints both sizes
    Pipeline(PipelineArgs),
    /// Print the peak density for n states
    PeakDensity {
        #[arg(long)]
        n: usize,
    },
    /// Sizes over the log-density grid for one n
    Sweep(SweepArgs),
    /// Expected against observed peak densities
    Table1(Table1Args),
    /// Ratio of trim automata among raw draws
    Table2(Table2Args),
    /// Compare accepted trees of random automata and their constructions
    Check(CheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SettingArg {
    A,
    B,
}

impl From<SettingArg> for Setting {
    fn from(s: SettingArg) -> Self {
        match s {
            SettingArg::A => Setting::A,
            SettingArg::B => Setting::B,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightsArg {
    Det,
    Canonical,
}

#[derive(Clone, Copy, ValueEnum)]
enum IntervalArg {
    StdError,
    StdDev,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value = "a")]
    setting: SettingArg,
    #[arg(long, default_value_t = 0.5)]
    d0: f64,
    #[arg(long, default_value_t = 0.5)]
    final_prob: f64,
    /// Random when omitted
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d2: f64,
    #[command(flatten)]
    model: ModelArgs,
    /// Redraw until the automaton is trim
    #[arg(long, overrides_with = "no_trim", default_value_t = true)]
    trim: bool,
    #[arg(long)]
    no_trim: bool,
    /// Draw index within the seed's stream
    #[arg(long, default_value_t = 0)]
    index: u64,
    #[arg(long, default_value_t = fta_core::randgen::DEFAULT_MAX_ATTEMPTS)]
    max_attempts: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FileArgs {
    /// Reads stdin when omitted
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Subset state budget
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d2: f64,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 0)]
    index: u64,
    #[arg(long, default_value_t = SWEEP_MAX_ATTEMPTS)]
    max_attempts: u64,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 40)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    steps: usize,
    /// Worker threads; 0 picks the number of CPUs
    #[arg(long, env = "FTA_THREADS", default_value_t = 0)]
    workers: usize,
    #[arg(long, default_value_t = SWEEP_MAX_ATTEMPTS)]
    max_attempts: u64,
    /// Subset state budget per trial (default 2^n)
    #[arg(long)]
    budget: Option<usize>,
    /// Size series weighting the peak fit
    #[arg(long, value_enum, default_value = "det")]
    weights: WeightsArg,
    #[arg(long, value_enum, default_value = "std-error")]
    interval: IntervalArg,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    run: RunArgs,
    /// Point CSV; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-trial CSV
    #[arg(long)]
    trials_out: Option<PathBuf>,
}

#[derive(Args)]
struct Table1Args {
    /// State counts (default 2 to 13)
    #[arg(long = "n", num_args = 1..)]
    ns: Vec<usize>,
    #[command(flatten)]
    run: RunArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Point CSV of every sweep
    #[arg(long)]
    points_out: Option<PathBuf>,
}

#[derive(Args)]
struct Table2Args {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 1000)]
    draws: u64,
    /// Include cells without a reference value
    #[arg(long)]
    all_cells: bool,
    #[arg(long, env = "FTA_THREADS", default_value_t = 0)]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, value_enum, default_value = "a")]
    setting: SettingArg,
    #[arg(long, default_value_t = 100)]
    cases: usize,
    #[arg(long, default_value_t = 4)]
    max_n: usize,
    #[arg(long, default_value_t = 4)]
    height: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error("check failed: {0} mismatching case(s)")]
    CheckFailed(usize),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Experiment(e.into())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Io { .. } | CliError::Csv(_) => 3,
            CliError::Parse { .. } => 4,
            CliError::Experiment(ExperimentError::Model(Error::Exhausted { .. })) => 5,
            CliError::Experiment(ExperimentError::Model(Error::SubsetBudget(_))) => 6,
            CliError::Experiment(_) => 7,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn effective_seed(seed: Option<u64>) -> u64 {
    let seed = seed.unwrap_or_else(|| {
        let t = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .unwrap_or_default();
        t.as_secs() ^ u64::from(t.subsec_nanos()) << 20
    });
    eprintln!("seed={seed}");
    seed
}

fn read_input(path: Option<&Path>) -> Result<Fta, CliError> {
    let (name, text) = match path {
        Some(p) => (
            p.display().to_string(),
            fs::read_to_string(p).map_err(io_err(p))?,
        ),
        None => {
            let mut s = String::new();
            io::Read::read_to_string(&mut io::stdin(), &mut s)
                .map_err(io_err(Path::new("<stdin>")))?;
            ("<stdin>".to_string(), s)
        }
    };
    parse_fta(&text).map_err(|source| CliError::Parse { path: name, source })
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(io_err(p)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(io_err(Path::new("<stdout>"))),
    }
}

fn with_csv(
    path: Option<&Path>,
    f: impl FnOnce(&mut dyn Write) -> csv::Result<()>,
) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let mut file = io::BufWriter::new(fs::File::create(p).map_err(io_err(p))?);
            f(&mut file)?;
            file.flush().map_err(io_err(p))
        }
        None => Ok(f(&mut io::stdout().lock())?),
    }
}

fn gen_config(n: usize, d2: f64, model: &ModelArgs, max_attempts: u64) -> GenConfig {
    GenConfig::new(n, Arc::new(Setting::from(model.setting).alphabet()), d2)
        .with_d0(model.d0)
        .with_final_prob(model.final_prob)
        .with_max_attempts(max_attempts)
}

fn budget_for(fta: &Fta, budget: Option<usize>) -> usize {
    budget.unwrap_or_else(|| 1usize.checked_shl(fta.size() as u32).unwrap_or(usize::MAX))
}

fn experiment_config(run: &RunArgs, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        trials: run.trials,
        steps: run.steps,
        seed,
        workers: run.workers,
        d0: run.model.d0,
        final_prob: run.model.final_prob,
        max_attempts: run.max_attempts,
        subset_budget: run.budget,
        weights: match run.weights {
            WeightsArg::Det => Weights::Determinized,
            WeightsArg::Canonical => Weights::Canonical,
        },
        scale: match run.interval {
            IntervalArg::StdError => IntervalScale::StdError,
            IntervalArg::StdDev => IntervalScale::StdDev,
        },
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(a) => {
            let seed = effective_seed(a.model.seed);
            let config = gen_config(a.n, a.d2, &a.model, a.max_attempts);
            let fta = if a.trim && !a.no_trim {
                let s = generate_trim(&config, Seed(seed), a.index)?;
                eprintln!("attempts={}", s.attempts);
                s.fta
            } else {
                generate_indexed(&config, Seed(seed), a.index)?
            };
            let text = format!("# seed={seed} index={}\n{}", a.index, format_fta(&fta));
            write_output(a.out.as_deref(), &text)
        }
        Command::Determinize(a) => {
            let fta = read_input(a.input.as_deref())?;
            let d = determinize_bounded(&fta, budget_for(&fta, a.budget))?;
            let out = d.dta().to_fta();
            println!("det_size={}", out.size());
            if let Some(p) = a.out.as_deref() {
                write_output(Some(p), &format_fta(&out))?;
            }
            Ok(())
        }
        Command::Minimize(a) => {
            let fta = read_input(a.input.as_deref())?;
            let d = determinize_bounded(&fta, budget_for(&fta, a.budget))?;
            let c = minimize(d.dta());
            println!("canonical_size={}", c.size());
            if let Some(p) = a.out.as_deref() {
                write_output(Some(p), &format_fta(&c.dta().to_fta()))?;
            }
            Ok(())
        }
        Command::Pipeline(a) => {
            let seed = a.model.seed.unwrap_or_else(|| effective_seed(None));
            let config = gen_config(a.n, a.d2, &a.model, a.max_attempts);
            let s = generate_trim(&config, Seed(seed), a.index)?;
            let d = determinize_bounded(&s.fta, budget_for(&s.fta, None))?;
            let c = minimize(d.dta());
            println!(
                "seed={seed} n={} d2={} attempts={} det_size={} canonical_size={}",
                a.n,
                a.d2,
                s.attempts,
                fta_core::det_size(&d),
                c.size()
            );
            Ok(())
        }
        Command::PeakDensity { n } => {
            println!("{:.4}", peak_density(n)?);
            Ok(())
        }
        Command::Sweep(a) => {
            let seed = effective_seed(a.run.model.seed);
            let cfg = experiment_config(&a.run, seed);
            let sweep = run_sweep(a.run.model.setting.into(), a.n, &cfg)?;
            with_csv(a.out.as_deref(), |w| {
                report::write_points(w, &cfg, &sweep.points)
            })?;
            if let Some(p) = a.trials_out.as_deref() {
                with_csv(Some(p), |w| report::write_trials(w, &cfg, &sweep.points))?;
            }
            let f = sweep.fit;
            eprintln!(
                "peak d2={:.4} observed={:.4} interval=[{:.4},{:.4}] sigma={:.4}",
                peak_density(a.n)?,
                f.observed_peak,
                f.lo,
                f.hi,
                f.sigma
            );
            Ok(())
        }
        Command::Table1(a) => {
            let seed = effective_seed(a.run.model.seed);
            let cfg = experiment_config(&a.run, seed);
            let setting = a.run.model.setting.into();
            let ns = if a.ns.is_empty() {
                (2..=13).collect()
            } else {
                a.ns
            };
            let results = table_densities(setting, &ns, &cfg)?;
            let rows: Vec<_> = results.iter().map(|(r, _)| r.clone()).collect();
            with_csv(a.out.as_deref(), |w| {
                report::write_density_table(w, &cfg, setting, &rows)
            })?;
            if let Some(p) = a.points_out.as_deref() {
                let points: Vec<_> = results
                    .iter()
                    .flat_map(|(_, s)| s.points.iter().cloned())
                    .collect();
                with_csv(Some(p), |w| report::write_points(w, &cfg, &points))?;
            }
            Ok(())
        }
        Command::Table2(a) => {
            let seed = effective_seed(a.model.seed);
            let cfg = ExperimentConfig {
                seed,
                workers: a.workers,
                d0: a.model.d0,
                final_prob: a.model.final_prob,
                ..Default::default()
            };
            let setting = a.model.setting.into();
            let cells = table_trim(setting, &trim_cells(a.all_cells), a.draws, &cfg)?;
            with_csv(a.out.as_deref(), |w| {
                report::write_trim_table(w, &cfg, setting, &cells)
            })
        }
        Command::Check(a) => {
            let seed = effective_seed(a.seed);
            let r = oracle_check(a.setting.into(), a.cases, a.max_n, a.height, seed)?;
            println!("checked={} mismatches={}", r.checked, r.mismatches.len());
            if r.passed() {
                Ok(())
            } else {
                Err(CliError::CheckFailed(r.mismatches.len()))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
