//! Command-line driver: batch oracle analysis of a multitrack dataset, song
//! ranking and subset selection, table correlation and mute plans.
//!
//! Every artifact embeds the resolved configuration of the run that made it
//! and the format version. Worker count and output directory are left out so
//! reruns compare byte for byte.

mod analyze;
mod plans;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{Map, Value};

use irmsep::{MetricConfig, OracleConfig, StftConfig, WindowKind, ZeroBinPolicy, FORMAT_VERSION};

pub use analyze::{analyze, AnalyzeReport, SongOutcome, SongScores};
pub use plans::{check_cola_cmd, correlate, mute_plan, mute_plan_file_name, rank, select};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, unreadable inputs or inconsistent configuration.
    #[error("{0}")]
    Config(String),
    /// The command ran but did not fully succeed.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl From<irmsep::Error> for CliError {
    fn from(e: irmsep::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "irmsep",
    version,
    about = "Oracle IRM separability analysis of multitrack datasets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Separate every song with oracle masks and score the estimates.
    Analyze(AnalyzeArgs),
    /// Rank songs by one metric of one instrument.
    Rank(RankArgs),
    /// Select a top, random or bottom fraction of the ranked songs.
    Select(SelectArgs),
    /// Correlate two score tables per instrument and metric.
    Correlate(CorrelateArgs),
    /// Plan which training songs get one instrument muted.
    MutePlan(MutePlanArgs),
    /// Check that a window and hop reconstruct perfectly.
    CheckCola(StftArgs),
}

#[derive(Debug, Clone, Args)]
pub struct StftArgs {
    #[arg(long, env = "IRMSEP_WINDOW_SIZE", default_value_t = 4096)]
    pub window_size: usize,
    #[arg(long, env = "IRMSEP_HOP", default_value_t = 1024)]
    pub hop: usize,
    #[arg(long, env = "IRMSEP_WINDOW", default_value_t = WindowKind::Hann)]
    pub window: WindowKind,
}

impl StftArgs {
    pub fn config(&self) -> StftConfig {
        StftConfig::new(self.window_size, self.hop, self.window)
    }
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[arg(long, env = "IRMSEP_DATASET")]
    pub dataset: PathBuf,
    /// Song list with splits; subdirectories of the dataset are used otherwise.
    #[arg(long, env = "IRMSEP_MANIFEST")]
    pub manifest: Option<PathBuf>,
    #[arg(long, env = "IRMSEP_OUT")]
    pub out: PathBuf,
    /// Song workers; 0 uses every core.
    #[arg(long, env = "IRMSEP_WORKERS", default_value_t = 0)]
    pub workers: usize,
    #[arg(long, env = "IRMSEP_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "IRMSEP_ALPHA", default_value_t = 2.0)]
    pub alpha: f64,
    #[command(flatten)]
    pub stft: StftArgs,
    #[arg(long, env = "IRMSEP_FILTER_LEN", default_value_t = 512)]
    pub filter_len: usize,
    /// Gain-only projections (one filter tap).
    #[arg(long, env = "IRMSEP_FAST_METRICS")]
    pub fast_metrics: bool,
    /// Evaluation window in seconds.
    #[arg(long, env = "IRMSEP_METRIC_WINDOW", default_value_t = 1.0)]
    pub metric_window: f64,
    /// Evaluation hop in seconds.
    #[arg(long, env = "IRMSEP_METRIC_HOP", default_value_t = 1.0)]
    pub metric_hop: f64,
    /// Comma-separated stem labels, overriding the manifest.
    #[arg(long, env = "IRMSEP_INSTRUMENTS", value_delimiter = ',')]
    pub instruments: Vec<String>,
    /// Keep the stems at their stored levels.
    #[arg(long, env = "IRMSEP_NO_NORMALIZE")]
    pub no_normalize: bool,
    /// Also write fig2.csv: per-instrument song rank against SI-SDR.
    #[arg(long, env = "IRMSEP_FIG2")]
    pub fig2: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RankArgs {
    /// Score table (.csv or .json).
    #[arg(long, env = "IRMSEP_SCORES")]
    pub scores: PathBuf,
    #[arg(long, env = "IRMSEP_METRIC", default_value = "si_sdr")]
    pub metric: irmsep::Metric,
    #[arg(long, env = "IRMSEP_INSTRUMENT")]
    pub instrument: String,
    /// Output file; stdout otherwise.
    #[arg(long, env = "IRMSEP_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub rank: RankArgs,
    #[arg(long, env = "IRMSEP_CRITERION")]
    pub criterion: irmsep::analysis::Criterion,
    #[arg(long, env = "IRMSEP_FRACTION", default_value_t = 0.1)]
    pub fraction: f64,
    #[arg(long, env = "IRMSEP_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct CorrelateArgs {
    pub scores_a: PathBuf,
    pub scores_b: PathBuf,
    /// Directory for correlations.csv and correlations.json; CSV to stdout otherwise.
    #[arg(long, env = "IRMSEP_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct MutePlanArgs {
    #[arg(long, env = "IRMSEP_DATASET")]
    pub dataset: PathBuf,
    /// Song list with splits; only its train songs are muted.
    #[arg(long, env = "IRMSEP_MANIFEST")]
    pub manifest: PathBuf,
    #[arg(long, env = "IRMSEP_INSTRUMENT")]
    pub instrument: String,
    /// Comma-separated ratios; 0.00 to 0.45 in steps of 0.05 by default.
    #[arg(long, env = "IRMSEP_RATIOS", value_delimiter = ',')]
    pub ratios: Vec<f64>,
    #[arg(long, env = "IRMSEP_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "IRMSEP_OUT")]
    pub out: PathBuf,
}

/// Resolved analysis configuration, as embedded in the outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub dataset: String,
    pub manifest: Option<String>,
    pub instruments: Vec<String>,
    pub normalize_loudness: bool,
    pub seed: u64,
    pub oracle: OracleConfig,
    pub metrics: MetricConfig,
    #[serde(skip)]
    pub out: PathBuf,
    #[serde(skip)]
    pub workers: usize,
}

impl RunConfig {
    pub fn from_args(args: &AnalyzeArgs) -> CliResult<Self> {
        let oracle = OracleConfig {
            alpha: args.alpha,
            stft: args.stft.config(),
            zero_bin_policy: ZeroBinPolicy::Uniform,
        };
        oracle.validate()?;
        let metrics = MetricConfig {
            window_length: args.metric_window,
            window_hop: args.metric_hop,
            filter_length: if args.fast_metrics {
                1
            } else {
                args.filter_len
            },
            ..MetricConfig::default()
        };
        metrics.validate()?;
        Ok(Self {
            dataset: args.dataset.display().to_string(),
            manifest: args.manifest.as_ref().map(|p| p.display().to_string()),
            instruments: args
                .instruments
                .iter()
                .map(|s| s.trim().to_ascii_lowercase())
                .filter(|s| !s.is_empty())
                .collect(),
            normalize_loudness: !args.no_normalize,
            seed: args.seed,
            oracle,
            metrics,
            out: args.out.clone(),
            workers: args.workers,
        })
    }
}

/// `{"command": ..., "run_config": ...}`, the metadata embedded in artifacts.
pub(crate) fn provenance<T: Serialize>(command: &str, config: &T) -> CliResult<Map<String, Value>> {
    let mut map = Map::new();
    map.insert("command".into(), Value::String(command.into()));
    let value = serde_json::to_value(config).map_err(|e| CliError::Config(e.to_string()))?;
    map.insert("run_config".into(), value);
    Ok(map)
}

/// Comment lines carrying the same metadata in CSV outputs.
pub(crate) fn preamble(meta: &Map<String, Value>) -> Vec<String> {
    let mut lines = vec![format!("format_version: {FORMAT_VERSION}")];
    for (k, v) in meta {
        lines.push(format!("{k}: {v}"));
    }
    lines
}

/// Pretty JSON of `value` with the format version and metadata merged in front.
pub(crate) fn json_document<T: Serialize>(
    meta: &Map<String, Value>,
    value: &T,
) -> CliResult<String> {
    let mut doc = Map::new();
    doc.insert("format_version".into(), FORMAT_VERSION.into());
    doc.extend(meta.clone());
    match serde_json::to_value(value).map_err(|e| CliError::Config(e.to_string()))? {
        Value::Object(fields) => doc.extend(fields),
        other => {
            doc.insert("value".into(), other);
        }
    }
    let mut s = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Config(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub(crate) fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents)
        .map_err(|e| CliError::Failed(format!("cannot write {}: {e}", path.display())))
}

pub(crate) fn create_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", path.display())))
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Analyze(args) => {
            let config = RunConfig::from_args(&args)?;
            analyze(&config, args.fig2).map(|_| ())
        }
        Command::Rank(args) => rank(&args),
        Command::Select(args) => select(&args),
        Command::Correlate(args) => correlate(&args),
        Command::MutePlan(args) => mute_plan(&args).map(|_| ()),
        Command::CheckCola(args) => check_cola_cmd(&args),
    }
}

/// Parses `args` (program name first) and runs the command, mapping
/// failures to exit codes: 0 success, 1 partial failure, 2 bad configuration.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("irmsep: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
