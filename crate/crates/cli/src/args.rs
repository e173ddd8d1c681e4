//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "wavebreak",
    version,
    about = "Wave breaking experiments for u_t + u u_x + K*u_x = 0"
)]
pub struct Cli {
    /// Directory for output files (created if missing).
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// key=value settings file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the spectral solver from a two-bump profile or an initial-condition CSV.
    Simulate(SimulateArgs),
    /// Region label of a slope pair.
    Classify(PointArgs),
    /// t*, T* and related bounds of a slope pair.
    Bounds(PointArgs),
    /// Integrate the comparison ODE from a point.
    Phase(PhaseArgs),
    /// Arrow field and region boundary on a window.
    Portrait(PortraitArgs),
    /// Grid or sampled sweep over initial slope pairs.
    Sweep(SweepArgs),
    /// Render an SVG plot from a CSV produced by another subcommand.
    Plot(PlotArgs),
}

#[derive(Args, Debug)]
pub struct PointArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub m1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub m2: Option<f64>,
    /// Kernel scale K(0); ignored when --kernel is given.
    #[arg(long)]
    pub k0: Option<f64>,
    #[arg(long)]
    pub kernel: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SolverArgs {
    /// gaussian:SIGMA, exponential:LAMBDA, whitham or tabulated:PATH
    #[arg(long)]
    pub kernel: Option<String>,
    /// Grid points (power of two, at least 256).
    #[arg(long)]
    pub n: Option<usize>,
    /// Domain length.
    #[arg(long = "L")]
    pub length: Option<f64>,
    /// Bump width of the initial profile.
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub cfl: Option<f64>,
    /// Retained fraction of the spectrum.
    #[arg(long)]
    pub dealias: Option<f64>,
    #[arg(long = "blowup-factor")]
    pub blowup_factor: Option<f64>,
    #[arg(long = "tail-limit")]
    pub tail_limit: Option<f64>,
    /// Record every STRIDE-th step.
    #[arg(long)]
    pub stride: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub m1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub m2: Option<f64>,
    /// Initial condition CSV (as written by `simulate`) instead of --m1/--m2.
    #[arg(long, conflicts_with_all = ["m1", "m2"])]
    pub ic: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Args, Debug)]
pub struct PhaseArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub m1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub m2: Option<f64>,
    /// Defaults to T* + 0.5 inside the region and 5 elsewhere.
    #[arg(long)]
    pub horizon: Option<f64>,
}

#[derive(Args, Debug)]
pub struct PortraitArgs {
    #[arg(long = "x-min", allow_negative_numbers = true)]
    pub x_min: Option<f64>,
    #[arg(long = "x-max", allow_negative_numbers = true)]
    pub x_max: Option<f64>,
    #[arg(long = "y-min", allow_negative_numbers = true)]
    pub y_min: Option<f64>,
    #[arg(long = "y-max", allow_negative_numbers = true)]
    pub y_max: Option<f64>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long = "m1-lo", allow_negative_numbers = true)]
    pub m1_lo: Option<f64>,
    #[arg(long = "m1-hi", allow_negative_numbers = true)]
    pub m1_hi: Option<f64>,
    #[arg(long = "m1-count")]
    pub m1_count: Option<usize>,
    /// `fraction` (m2 as a fraction of m1² + m1) or `absolute`.
    #[arg(long = "m2-mode")]
    pub m2_mode: Option<String>,
    #[arg(long = "m2-lo", allow_negative_numbers = true)]
    pub m2_lo: Option<f64>,
    #[arg(long = "m2-hi", allow_negative_numbers = true)]
    pub m2_hi: Option<f64>,
    #[arg(long = "m2-count")]
    pub m2_count: Option<usize>,
    /// `pde` or `ode`.
    #[arg(long)]
    pub backend: Option<String>,
    /// Draw this many random points from the box instead of the grid.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Portrait,
    Series,
    Trajectory,
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    #[arg(long, value_enum)]
    pub kind: PlotKind,
    /// Arrow CSV for portraits, series CSV or trajectory CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Boundary-curve CSV (portrait).
    #[arg(long)]
    pub curves: Option<PathBuf>,
    /// Summary file whose t*, T* and K(0) mark a series plot.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Output file; defaults to <out>/<kind>.svg.
    #[arg(long)]
    pub output: Option<PathBuf>,
}
