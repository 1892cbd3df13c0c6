use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "bn", version, about = "Bimodal normal distribution toolkit")]
pub struct Cli {
    /// Master seed; every random stream is derived from it.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Worker threads for replicated experiments [default: available cores].
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Output format [default: json for single results, csv for tables].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a distribution quantity.
    Eval(EvalArgs),
    /// Draw a sample and write it as CSV with header `x`.
    Sample(SampleArgs),
    /// Maximum-likelihood fit of a CSV sample (column `x`).
    Fit(FitArgs),
    /// Replicated fitting study: bias and RMSE per (alpha, n).
    McStudy(McStudyArgs),
    /// Bivariate queries.
    Bivar(BivarArgs),
    /// Process experiments: ergodicity, quadrant dependence, triangular-array sums.
    Process(ProcessArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct BnArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalWhat {
    Pdf,
    Logpdf,
    Cdf,
    Quantile,
    Hazard,
    Modes,
    Moments,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub params: BnArgs,
    #[arg(long, value_enum)]
    pub what: EvalWhat,
    /// Evaluation point for pdf, logpdf, cdf and hazard.
    #[arg(long, allow_negative_numbers = true)]
    pub x: Option<f64>,
    /// Probability for quantile.
    #[arg(long)]
    pub q: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub params: BnArgs,
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Solver {
    Newton,
    FixedPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Moment,
    Grid,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV file with a column named `x`.
    #[arg(long)]
    pub input: PathBuf,
    /// Hold a parameter fixed, e.g. `--fix mu=0 --fix sigma=1`.
    #[arg(long = "fix", value_parser = parse_fix)]
    pub fix: Vec<(usize, f64)>,
    #[arg(long, value_enum, default_value_t = Solver::Newton)]
    pub solver: Solver,
    #[arg(long, value_enum, default_value_t = InitArg::Moment)]
    pub init: InitArg,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Confidence level of the interval for alpha.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
}

fn parse_fix(s: &str) -> Result<(usize, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let index = match name.trim() {
        "mu" => 0,
        "sigma" => 1,
        "alpha" => 2,
        other => return Err(format!("unknown parameter `{other}`; use mu, sigma or alpha")),
    };
    let value: f64 = value.trim().parse().map_err(|e| format!("bad value in `{s}`: {e}"))?;
    Ok((index, value))
}

#[derive(Debug, Args)]
pub struct McStudyArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [10, 75, 250, 600])]
    pub n_values: Vec<usize>,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = [-2.0, -0.5, 0.8, 3.0])]
    pub alpha_values: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    pub replications: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BivarWhat {
    Pdf2,
    Cov,
    Corr,
    Condmean,
    Marginals,
    Sample2,
}

#[derive(Debug, Args)]
pub struct BivarArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu1: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub rho: f64,
    #[arg(long, value_enum)]
    pub what: BivarWhat,
    #[arg(long, allow_negative_numbers = true)]
    pub x1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x2: Option<f64>,
    /// Number of pairs for sample2.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    Ergodicity,
    Pqd,
    Clt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DependenceArg {
    Comonotone,
    Independent,
    SharedSign,
}

impl From<DependenceArg> for bn_core::Dependence {
    fn from(d: DependenceArg) -> Self {
        match d {
            DependenceArg::Comonotone => bn_core::Dependence::Comonotone,
            DependenceArg::Independent => bn_core::Dependence::IndependentShocks,
            DependenceArg::SharedSign => bn_core::Dependence::SharedSign,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SigmaFn {
    /// `exp(-t²)`
    Gauss,
    /// `1`
    Const,
}

#[derive(Debug, Args)]
pub struct ProcessArgs {
    #[arg(long, value_enum)]
    pub experiment: Experiment,
    /// Joint law of the shocks across indices. Required: the choice changes the results.
    #[arg(long, value_enum)]
    pub dependence: DependenceArg,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Time-constant mean for the ergodicity experiment.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, value_enum, default_value_t = SigmaFn::Gauss)]
    pub sigma_fn: SigmaFn,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 5.0, 10.0, 20.0])]
    pub t_values: Vec<f64>,
    /// Correlation constant in the closed-form ergodicity variance; 1 matches the comonotone generator.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub rho: f64,
    #[arg(long, default_value_t = 2000)]
    pub paths: usize,
    /// Initial grid step for temporal means; refined by halving.
    #[arg(long, default_value_t = 0.5)]
    pub step: f64,
    /// Geometric ratio of the triangular array scales, sigma_k = r^-k.
    #[arg(long, default_value_t = 2.0)]
    pub r: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [5, 10, 50])]
    pub n_values: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    pub replications: usize,
    /// Second marginal for the quadrant-dependence grid.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub mu_y: f64,
    #[arg(long, default_value_t = 2.0)]
    pub sigma_y: f64,
    #[arg(long, default_value_t = -6.0, allow_negative_numbers = true)]
    pub grid_lo: f64,
    #[arg(long, default_value_t = 8.0, allow_negative_numbers = true)]
    pub grid_hi: f64,
    #[arg(long, default_value_t = 0.25)]
    pub grid_step: f64,
}
