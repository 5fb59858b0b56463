use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "geoflow", version, about = "Curvature and soliton verification engine")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the identity suite on a catalog or warped instance.
    Verify(VerifyArgs),
    /// Dump every curvature tensor at one point.
    Tensors(TensorArgs),
    /// Integrate the warped-product soliton ODE from tip data.
    Bryant(BryantArgs),
    /// Run the acceptance criteria.
    Suite(SuiteArgs),
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Catalog name (`gaussian`, `agila1`, ... or `warped:<spec>`).
    #[arg(long, conflicts_with = "warped", required_unless_present = "warped")]
    pub example: Option<String>,
    /// Warped spec such as `n=3;fiber=sphere;h=sin(t);f=0;t=0.1..3`.
    #[arg(long)]
    pub warped: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Uniform multiplier on the tolerance ladder.
    #[arg(long, default_value_t = 1.0)]
    pub tol_scale: f64,
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Add `eps·x₁x₂` to the potential.
    #[arg(long, allow_hyphen_values = true)]
    pub perturb: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct TensorArgs {
    #[arg(long)]
    pub example: String,
    /// Comma-separated chart point.
    #[arg(long, allow_hyphen_values = true)]
    pub at: String,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BryantArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub rho: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub lambda: f64,
    /// Fiber curvature.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub kappa: f64,
    /// Tip value of `f''`.
    #[arg(long, allow_hyphen_values = true)]
    pub c0: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 50.0)]
    pub t_max: f64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Summary report.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Re-verify the interpolated metric through the curvature pipeline.
    #[arg(long)]
    pub embed_check: bool,
    /// Require both sectional curvatures positive up to `t_max`.
    #[arg(long)]
    pub require_positive: bool,
    /// Fail when integration stops before this `t`.
    #[arg(long)]
    pub t_min_survive: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SuiteArgs {
    /// Run every criterion.
    #[arg(long)]
    pub all: bool,
    /// Run only these criteria (1-12).
    #[arg(long, value_delimiter = ',', conflicts_with = "all")]
    pub only: Vec<u8>,
    /// One JSON report per criterion goes here.
    #[arg(long)]
    pub json_dir: Option<PathBuf>,
    /// Evaluate curvature with a flipped sign.
    #[arg(long, hide = true, value_enum, num_args = 0..=1, default_missing_value = "operator")]
    pub flip_sign: Option<FlipArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FlipArg {
    Operator,
    Lowering,
}

impl From<FlipArg> for geoflow_core::geometry::SignFlip {
    fn from(f: FlipArg) -> Self {
        match f {
            FlipArg::Operator => Self::Operator,
            FlipArg::Lowering => Self::Lowering,
        }
    }
}
