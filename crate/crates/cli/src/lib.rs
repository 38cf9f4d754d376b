//! Batch front end: `profile`, `metrics`, `correlate` and `compare`.
//!
//! Per-image work is spread over a fixed-size worker pool; results are sorted
//! by image id before anything is aggregated, so reports are byte-identical
//! for any worker count.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod compare;
mod correlate;
mod error;
mod metrics;
pub mod output;
mod profile;

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "dsp", version, about = "Delentropy-based scene complexity profiling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Complexity measures for every image of a manifest, plus the scene profile.
    Profile(ProfileArgs),
    /// PSNR and SSIM between matching ground-truth and rendered images.
    Metrics(MetricsArgs),
    /// Correlates complexity measures with quality metrics.
    Correlate(CorrelateArgs),
    /// Descriptor deltas and comparability warnings for two profiles.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RangeArg {
    Theoretical,
    PerImageMax,
}

impl From<RangeArg> for delentropy::entropy::GradientRange {
    fn from(r: RangeArg) -> Self {
        match r {
            RangeArg::Theoretical => Self::Theoretical,
            RangeArg::PerImageMax => Self::PerImageMax,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pooling {
    /// One correlation over all joined images.
    Pooled,
    /// One correlation per scene, plus the mean r across scenes.
    PerScene,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn parse_workers(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("expected a worker count >= 1, got `{s}`")),
    }
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    /// Scene manifest (JSON).
    #[arg(long)]
    pub manifest: PathBuf,
    /// Histogram bins per gradient axis.
    #[arg(long, default_value_t = 256)]
    pub bins: usize,
    /// Gaussian blur sigma, pixels.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 3)]
    pub blur_kernel: usize,
    #[arg(long, default_value_t = 3)]
    pub sobel_kernel: usize,
    #[arg(long, value_enum, default_value = "theoretical")]
    pub gradient_range: RangeArg,
    /// Gray levels of the co-occurrence baseline.
    #[arg(long, default_value_t = 32)]
    pub glcm_levels: usize,
    /// Bins of the emitted profile histogram.
    #[arg(long, default_value_t = 20)]
    pub hist_bins: usize,
    #[arg(long, default_value_t = default_workers(), value_parser = parse_workers)]
    pub workers: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Directory of ground-truth images.
    #[arg(long)]
    pub gt: PathBuf,
    /// Directory of rendered images, same relative paths as `--gt`.
    #[arg(long)]
    pub render: PathBuf,
    /// Glob applied to paths relative to each directory.
    #[arg(long, default_value = "*.png")]
    pub pattern: String,
    #[arg(long, default_value_t = default_workers(), value_parser = parse_workers)]
    pub workers: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    /// `profile` report (JSON) or CSV with `image_id` and complexity columns. Repeatable.
    #[arg(long, required = true)]
    pub complexity: Vec<PathBuf>,
    /// `metrics` report (JSON) or metrics CSV. Repeatable.
    #[arg(long, required = true)]
    pub quality: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "pooled")]
    pub pooling: Pooling,
    /// Prediction-interval level.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub profile_a: PathBuf,
    pub profile_b: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub(crate) fn pool(workers: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {workers} workers: {e}")))
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Profile(a) => profile::run(a, stdout, stderr),
        Command::Metrics(a) => metrics::run(a, stdout, stderr),
        Command::Correlate(a) => correlate::run(a, stdout, stderr),
        Command::Compare(a) => compare::run(a, stdout, stderr),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status.
pub fn run_with<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                1
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
