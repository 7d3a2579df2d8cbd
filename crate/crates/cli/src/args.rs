//! Flag grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::emit::Format;

#[derive(Parser, Debug)]
#[command(
    name = "pantograph",
    version,
    about = "Certified computations for x'(t) = x(t/2), x(0) = 1, and its functional PDE relatives"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Tolerance: relative for values, absolute for bracket widths
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Largest series truncation order
    #[arg(long, global = true, default_value_t = 512)]
    pub max_terms: usize,
    /// Largest denominator bit size in exact sums
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub max_bits: u64,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when absent
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads; 1 runs sequentially
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// key=value file of defaults; command-line flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Values of the power series solution f(x) = Σ xⁿ/(n!·α^{n(n-1)/2})
    Eval(EvalArgs),
    /// Certified brackets of the negative zeros x_1 > x_2 > … of f
    Zeros(ZerosArgs),
    /// θ_n = -x_n/2^{n-1} - n, n·θ_n and enclosures of the limit constant
    Theta(ThetaArgs),
    /// Number of complex zeros of f inside a rectangle (argument principle)
    Boxcount(BoxArgs),
    /// Root inventories of the truncated polynomials P_N
    Truncpoly(TruncArgs),
    /// Dense solutions of built-in functional differential equations
    Ode(OdeArgs),
    /// Spectral solution of u_t(t,x) = u_xx(t/2,x)
    Heat(HeatArgs),
    /// Classical versus functional Burgers from sin x on the circle
    Burgers(BurgersArgs),
    /// (t, f(t)) data of the solution on [-20,0], [-1000,0] and [-5000,0]
    Figures(FiguresArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eval(_) => "eval",
            Command::Zeros(_) => "zeros",
            Command::Theta(_) => "theta",
            Command::Boxcount(_) => "boxcount",
            Command::Truncpoly(_) => "truncpoly",
            Command::Ode(_) => "ode",
            Command::Heat(_) => "heat",
            Command::Burgers(_) => "burgers",
            Command::Figures(_) => "figures",
        }
    }
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Points to evaluate at
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    pub x: Vec<f64>,
    /// Uniform sample range `A B` (used with --points)
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    pub range: Option<Vec<f64>>,
    /// Number of samples in --range
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    /// Delay ratio α > 1 of the series
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
}

#[derive(Args, Debug)]
pub struct ZerosArgs {
    /// Number of zeros to localize
    #[arg(long, default_value_t = 10)]
    pub n_max: u32,
    /// Report every zero in [X_MIN, 0) instead of the first n-max
    #[arg(long, allow_negative_numbers = true)]
    pub x_min: Option<f64>,
}

#[derive(Args, Debug)]
pub struct ThetaArgs {
    /// Number of zeros to study
    #[arg(long, default_value_t = 20)]
    pub n_max: u32,
    /// First index at which n·θ_n is checked against (66/25, 2167/789)
    #[arg(long, default_value_t = 15)]
    pub window_from: u32,
    /// Term pairs in the ratio-of-sums enclosure of the limit constant
    #[arg(long, default_value_t = 8)]
    pub pairs: usize,
    /// Terms in the h(α) logarithmic-derivative enclosure of the limit constant
    #[arg(long, default_value_t = 12)]
    pub terms: usize,
}

#[derive(Args, Debug)]
pub struct BoxArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub re_lo: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub re_hi: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub im_lo: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub im_hi: f64,
    /// Truncation degree; chosen from the box radius when absent
    #[arg(long)]
    pub n_trunc: Option<usize>,
    /// Initial samples per edge
    #[arg(long, default_value_t = 64)]
    pub segments: usize,
    /// Maximum bisection depth per edge segment
    #[arg(long, default_value_t = 24)]
    pub depth: u32,
}

#[derive(Args, Debug)]
pub struct TruncArgs {
    #[arg(long, default_value_t = 3)]
    pub n_min: usize,
    #[arg(long, default_value_t = 25)]
    pub n_max: usize,
    /// Emit the derivative-cubic discriminants for n in [n-min, n-max] instead
    #[arg(long)]
    pub discriminant: bool,
}

#[derive(Args, Debug)]
pub struct OdeArgs {
    /// linear_like, riccati_like, classical_riccati, classical_linear or wave_mode
    #[arg(long, default_value = "linear_like")]
    pub problem: String,
    /// End time; negative values integrate backwards from 0
    #[arg(long, allow_negative_numbers = true, default_value_t = 10.0)]
    pub t_end: f64,
    /// Output samples on the uniform grid between 0 and t-end
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    /// Initial state
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    pub x0: Option<Vec<f64>>,
    /// Frequency of wave_mode
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Delay ratio
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Norm at which the solution is declared to blow up
    #[arg(long, default_value_t = 1e12)]
    pub blow_up_norm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Datum {
    Gaussian,
    Lorentzian,
    Triangle,
}

#[derive(Args, Debug)]
pub struct HeatArgs {
    /// Initial datum: e^{-a x²}, γ²/(γ²+x²) or a triangle of half-width w
    #[arg(long, value_enum, default_value_t = Datum::Gaussian)]
    pub datum: Datum,
    /// Datum parameter a, γ or w
    #[arg(long, default_value_t = 1.0)]
    pub param: f64,
    /// Output times
    #[arg(long, num_args = 1.., default_values_t = [0.0, 0.5, 1.0])]
    pub times: Vec<f64>,
    #[arg(long, allow_negative_numbers = true, default_value_t = -6.0)]
    pub x_min: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 6.0)]
    pub x_max: f64,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    /// Emit the evolved spectrum (λ, φ̂(λ)·f(-λ²t)) instead of the field
    #[arg(long)]
    pub spectrum: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BurgersMode {
    Classical,
    Functional,
    Both,
}

#[derive(Args, Debug)]
pub struct BurgersArgs {
    #[arg(long, value_enum, default_value_t = BurgersMode::Both)]
    pub mode: BurgersMode,
    /// Final time
    #[arg(long, default_value_t = 3.0)]
    pub t_end: f64,
    /// Grid size, a power of two
    #[arg(long, default_value_t = 512)]
    pub points: usize,
    /// Time step
    #[arg(long, default_value_t = 0.01)]
    pub h: f64,
    /// Emit fields at these times instead of the gradient trace
    #[arg(long, num_args = 1..)]
    pub times: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
pub struct FiguresArgs {
    /// 1: [-20,0], 2: [-1000,0], 3: [-5000,0]
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub figure: u8,
    /// Override the interval
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    pub range: Option<Vec<f64>>,
    #[arg(long, default_value_t = 2001)]
    pub points: usize,
}
