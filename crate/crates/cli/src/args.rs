use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dualgeo::verify::Suite;
use dualgeo::{DivergenceKind, ToleranceConfig};

const REPORT_SCHEMA: &str = "\
Verification report schema (JSON):
  suite              suite name
  model              model spec string
  seed               sampling seed
  checks[]           id, max_error, tolerance (null = informational), samples,
                     failures, detail (optional), pass
  pass               conjunction of all check passes
  duration_seconds   present only with --timing
Without --model, verify emits {suite, seed, pass, reports: [...]} over every builtin.

Exit codes: 0 success, 1 failed checks, 2 bad input or configuration,
3 (div only) one or more pairs failed to converge.";

#[derive(Debug, Parser)]
#[command(name = "dualgeo", version, about = "Geodesic divergences on statistical manifolds", after_help = REPORT_SCHEMA)]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the builtin models.
    Models {
        #[arg(long, value_enum, default_value_t = ListFormat::Text)]
        format: ListFormat,
    },
    /// Evaluate a divergence for one pair or a batch of pairs.
    Div(DivArgs),
    /// Run seeded verification suites.
    Verify(VerifyArgs),
    /// Evaluate divergences over a grid of q for a fixed p.
    Sweep(SweepArgs),
    /// Scatter of D*(p,q) against D(q,p) with a rank-agreement verdict.
    #[command(name = "probe-f")]
    ProbeF(ProbeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ListFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// How point coordinates are given on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Coords {
    /// The model's working chart (natural parameters on the exponential families).
    Natural,
    /// Probabilities `p_1..p_n` or `p_0..p_n` (categorical models only).
    Mixture,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model spec `name:dim[:param...]` or a JSON object.
    #[arg(long)]
    pub model: String,

    #[arg(long, value_enum, default_value_t = Coords::Natural)]
    pub coords: Coords,
}

#[derive(Debug, Args)]
pub struct Tolerances {
    /// Relative ODE tolerance; the absolute tolerance is set to 1% of it.
    #[arg(long, value_name = "TOL")]
    pub tol_ode: Option<f64>,

    /// Shooting convergence threshold in chart coordinates.
    #[arg(long, value_name = "TOL")]
    pub tol_shoot: Option<f64>,

    /// Gauss-Legendre node count.
    #[arg(long, value_name = "N")]
    pub quad_nodes: Option<usize>,

    /// Base finite-difference step.
    #[arg(long, value_name = "H")]
    pub fd_step: Option<f64>,
}

impl Tolerances {
    pub fn config(&self) -> dualgeo::Result<ToleranceConfig> {
        let mut cfg = ToleranceConfig::default();
        if let Some(t) = self.tol_ode {
            cfg.ode_rel_tol = t;
            cfg.ode_abs_tol = t * 1e-2;
        }
        if let Some(t) = self.tol_shoot {
            cfg.shoot_tol = t;
        }
        if let Some(n) = self.quad_nodes {
            cfg.quad_nodes = n;
        }
        if let Some(h) = self.fd_step {
            cfg.fd_step = h;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write to a file instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DivArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    #[arg(long, default_value = "canonical")]
    pub kind: DivergenceKind,

    /// Base point(s): comma-separated reals, `;` between points.
    #[arg(short = 'p', allow_hyphen_values = true)]
    pub p: String,

    /// Target point(s), same format; a single p is paired with every q.
    #[arg(short = 'q', allow_hyphen_values = true)]
    pub q: String,

    #[command(flatten)]
    pub tol: Tolerances,

    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Model spec; every builtin is checked when omitted.
    #[arg(long)]
    pub model: Option<String>,

    #[arg(long, default_value = "all")]
    pub suite: Suite,

    /// Sample count (default depends on the suite).
    #[arg(long)]
    pub samples: Option<usize>,

    #[arg(long, default_value_t = 7)]
    pub seed: u64,

    /// Record wall-clock duration (makes reports non-reproducible).
    #[arg(long)]
    pub timing: bool,

    #[command(flatten)]
    pub tol: Tolerances,

    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Comma-separated divergence kinds.
    #[arg(long, default_value = "canonical", value_delimiter = ',')]
    pub kind: Vec<DivergenceKind>,

    /// Fixed base point.
    #[arg(short = 'p', allow_hyphen_values = true)]
    pub p: String,

    /// `lo:hi:n` per axis, comma-separated; one entry applies to all axes.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: String,

    #[command(flatten)]
    pub tol: Tolerances,

    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Base point; sampled from the seed when omitted.
    #[arg(short = 'p', allow_hyphen_values = true)]
    pub p: Option<String>,

    /// Number of partner points (at least 10).
    #[arg(long, default_value_t = 20)]
    pub samples: usize,

    #[arg(long, default_value_t = 7)]
    pub seed: u64,

    #[command(flatten)]
    pub tol: Tolerances,

    #[command(flatten)]
    pub out: OutputArgs,
}
