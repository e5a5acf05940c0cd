use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "tsad-eval", version, about = "Score time-series anomaly detectors under raw, PA, PA%K and PAdf protocols")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score saved detector output against ground-truth labels.
    Evaluate(EvaluateArgs),
    /// Emit analytic F1-vs-threshold curves for the uniform random-score model.
    Curves(CurvesArgs),
    /// Monte-Carlo baseline: evaluate random-score detectors on a label file.
    Simulate(SimulateArgs),
    /// Generate a synthetic case suite and score it.
    Cases(CasesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    Raw,
    Pa,
    Pak,
    Padf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Decayed,
    Adjusted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    #[value(name = "appendix-d")]
    AppendixD,
}

/// Protocol selection; comma lists expand to the cross product of runs.
#[derive(Debug, Args)]
pub struct ProtocolArgs {
    /// Protocols to run.
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    pub protocol: Vec<ProtocolArg>,

    /// PA%K threshold(s) in percent.
    #[arg(long, value_delimiter = ',', default_value = "20")]
    pub k: Vec<f64>,

    /// PAdf exponential decay rate(s).
    #[arg(long, value_delimiter = ',', default_value = "0.9")]
    pub d: Vec<f64>,

    /// PAdf precision mode(s).
    #[arg(long, value_enum, value_delimiter = ',', default_value = "decayed")]
    pub precision_mode: Vec<ModeArg>,

    /// F-beta weight.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Ground-truth labels (CSV with header, or JSON array).
    #[arg(long)]
    pub labels: PathBuf,

    /// Raw anomaly scores; needs --threshold or --sweep.
    #[arg(long, conflicts_with = "predictions", required_unless_present = "predictions")]
    pub scores: Option<PathBuf>,

    /// Detector predictions: 0/1 flags, or probabilities with --prob.
    #[arg(long)]
    pub predictions: Option<PathBuf>,

    /// Treat predictions as per-point anomaly probabilities.
    #[arg(long, requires = "predictions")]
    pub prob: bool,

    /// Fixed threshold: a point is anomalous iff its score is above it.
    #[arg(long, conflicts_with_all = ["sweep", "predictions"])]
    pub threshold: Option<f64>,

    /// Pick the best-F1 threshold per protocol.
    #[arg(long, conflicts_with = "predictions")]
    pub sweep: bool,

    /// Sweep over this many score quantiles instead of every distinct score.
    #[arg(long, requires = "sweep")]
    pub quantiles: Option<usize>,

    #[command(flatten)]
    pub protocols: ProtocolArgs,

    /// Report path; .json or .csv.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    /// Segment length(s).
    #[arg(long = "n", value_delimiter = ',', default_value = "500")]
    pub segment_len: Vec<usize>,

    /// Fraction of anomalous points.
    #[arg(long, default_value_t = 0.05)]
    pub anomaly_ratio: f64,

    /// PAdf decay rate(s); a PA curve is always emitted alongside.
    #[arg(long, value_delimiter = ',', default_value = "1.0,0.9,0.7")]
    pub d: Vec<f64>,

    /// Threshold grid as start:stop:step.
    #[arg(long, default_value = "0:1:0.001")]
    pub theta_grid: String,

    /// Curve CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Ground-truth labels to score the random detectors against.
    #[arg(long)]
    pub labels: PathBuf,

    #[command(flatten)]
    pub protocols: ProtocolArgs,

    /// Number of random-score trials.
    #[arg(long, default_value_t = tsad_eval::simulate::DEFAULT_TRIALS)]
    pub trials: usize,

    /// RNG seed.
    #[arg(long, env = "TSAD_EVAL_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Fixed threshold for every trial.
    #[arg(long, conflicts_with = "sweep")]
    pub threshold: Option<f64>,

    /// Best-F1 threshold per trial (the default).
    #[arg(long)]
    pub sweep: bool,

    /// Statistics path; .json or .csv.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CasesArgs {
    #[arg(long, value_enum, default_value = "appendix-d")]
    pub suite: SuiteArg,

    /// PAdf decay rate.
    #[arg(long, default_value_t = 0.9)]
    pub d: f64,

    #[arg(long, value_enum, default_value = "decayed")]
    pub precision_mode: ModeArg,

    /// Directory for the generated series and table.csv.
    #[arg(long)]
    pub out_dir: PathBuf,
}
