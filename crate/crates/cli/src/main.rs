//! `logshot`: simulate logarithmic shot-noise processes and run the
//! covariance, quadratic-variation and scaling-limit experiments.

mod commands;
mod error;
mod output;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliResult;
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "logshot", version, about = "Logarithmic shot-noise simulator and estimators")]
struct Cli {
    /// Maximum number of worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    /// Response (log t - log u)^β for t > u.
    #[value(alias = "logarithmic")]
    Log,
    /// Response (t - u)^β for t > u.
    #[value(alias = "polynomial")]
    Poly,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Output file; standard output when omitted. Relative paths are placed
    /// under $LOGSHOT_OUT_DIR when that is set.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate sample paths on a time grid.
    Simulate(SimulateArgs),
    /// Covariances: closed form against a Monte Carlo estimate.
    Cov(CovArgs),
    /// Expected and realized quadratic variation over refining partitions.
    Qv(QvArgs),
    /// Covariance and shape diagnostics of the rescaled process against its Gaussian limit.
    Limit(LimitArgs),
    /// Exact samples of the limiting Gaussian process.
    Hfbm(HfbmArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Response function.
    #[arg(long, value_enum, default_value_t = KernelArg::Log)]
    pub kernel: KernelArg,
    /// Response exponent β, in (0, 1/2).
    #[arg(long)]
    pub beta: f64,
    /// Arrival rate of the Poisson epochs.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Mark distribution: [gaussian-|rademacher-]VARIANT[:KEY=VALUE,...] with
    /// variants const:K2, powerlaw:K,gamma, shifted:K,gamma and
    /// logdecay:K,gamma[,horizon].
    #[arg(long, default_value = "gaussian-const:1")]
    pub noise: String,
    /// Time grid as start:stop:points (both ends included).
    #[arg(long, default_value = "0:10:1001")]
    pub grid: String,
    /// Number of independent paths.
    #[arg(long = "ensemble", short = 'M', default_value_t = 1)]
    pub ensemble: usize,
    /// Random seed.
    #[arg(long, default_value_t = logshot::DEFAULT_SEED)]
    pub seed: u64,
    /// Also evaluate the power response on the same arrivals and marks.
    #[arg(long)]
    pub compare_poly: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CovArgs {
    /// Response function.
    #[arg(long, value_enum, default_value_t = KernelArg::Log)]
    pub kernel: KernelArg,
    /// Response exponent β, in (0, 1/2).
    #[arg(long)]
    pub beta: f64,
    /// Arrival rate of the Poisson epochs.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Mark distribution, as for `simulate`.
    #[arg(long, default_value = "gaussian-const:1")]
    pub noise: String,
    /// Comma-separated times; every pair s <= t is reported.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 4.0])]
    pub times: Vec<f64>,
    /// Monte Carlo ensemble size (0 skips the estimate).
    #[arg(long = "ensemble", short = 'M', default_value_t = 10_000)]
    pub ensemble: usize,
    /// Random seed.
    #[arg(long, default_value_t = logshot::DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct QvArgs {
    /// Response exponent β, in (0, 1/2).
    #[arg(long)]
    pub beta: f64,
    /// Arrival rate of the Poisson epochs.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Mark distribution; the expected values need a const variant.
    #[arg(long, default_value = "gaussian-const:1")]
    pub noise: String,
    /// Right end T of the partitioned interval [0, T].
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    /// Comma-separated partition sizes n.
    #[arg(long, value_delimiter = ',', default_values_t = [64, 128, 256, 512, 1024, 2048, 4096])]
    pub ns: Vec<usize>,
    /// Paths per partition size for the realized values (0 skips them).
    #[arg(long = "ensemble", short = 'M', default_value_t = 1000)]
    pub ensemble: usize,
    /// Random seed.
    #[arg(long, default_value_t = logshot::DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct LimitArgs {
    /// Memory index α in (1, 2); the response exponent is (α - 1)/2.
    #[arg(long)]
    pub alpha: f64,
    /// Arrival rate of the Poisson epochs.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Mark distribution with bounded, convergent variance.
    #[arg(long, default_value = "gaussian-shifted:K=1,gamma=0.5")]
    pub noise: String,
    /// Comma-separated positive times.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0, 4.0])]
    pub times: Vec<f64>,
    /// Comma-separated time scales c >= 1.
    #[arg(long, value_delimiter = ',', default_values_t = [10.0, 100.0, 1000.0])]
    pub scales: Vec<f64>,
    /// Paths per scale.
    #[arg(long = "ensemble", short = 'M', default_value_t = 50_000)]
    pub ensemble: usize,
    /// Random seed.
    #[arg(long, default_value_t = logshot::DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct HfbmArgs {
    /// Memory index α in (0, 1) ∪ (1, 2); α = 1 gives Brownian motion.
    #[arg(long)]
    pub alpha: f64,
    /// Time grid as start:stop:points (both ends included).
    #[arg(long, default_value = "0:10:101")]
    pub grid: String,
    /// Number of independent paths.
    #[arg(long = "ensemble", short = 'M', default_value_t = 1)]
    pub ensemble: usize,
    /// Random seed.
    #[arg(long, default_value_t = logshot::DEFAULT_SEED)]
    pub seed: u64,
    /// Check the increment-variance properties on random triples and report
    /// pass/fail counts on standard error.
    #[arg(long)]
    pub check_properties: bool,
    /// Number of random triples for --check-properties.
    #[arg(long, default_value_t = 10_000)]
    pub triples: usize,
    /// Absolute tolerance for --check-properties.
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(error::invalid("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| error::invalid(e.to_string()))?;
    }
    match cli.command {
        Command::Simulate(a) => commands::simulate(&a),
        Command::Cov(a) => commands::cov(&a),
        Command::Qv(a) => commands::qv(&a),
        Command::Limit(a) => commands::limit(&a),
        Command::Hfbm(a) => commands::hfbm(&a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("logshot: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
