//! Command-line grammar and the small value parsers behind it.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tomokit::{Error, Result, SpatialGrid, TimeProfile};

#[derive(Debug, Parser)]
#[command(
    name = "tomokit",
    version,
    about = "Symplectic tomograms: simulate, reconstruct, evolve, measure"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a state and write one tomogram slice per direction.
    Simulate(SimulateArgs),
    /// Recover segment phases from a bundle of slices.
    Reconstruct(ReconstructArgs),
    /// Integrate the oscillator and recover initial tomograms from position data.
    Evolve(EvolveArgs),
    /// Gaussian completeness report for a bundle of slices.
    Measure(MeasureArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Preset (vacuum, gaussian:x0,p0,sigma, fock:n, flat-top:w,edge,
    /// node-benchmark:delta, four-segment:p1,p2,p3,p4, gaussian-cov:sxx,spp,sxp)
    /// or a .json preset / .csv wavefunction file.
    #[arg(long)]
    pub state: String,
    /// x_min,x_max,n_points
    #[arg(long, value_parser = parse_grid, default_value = "-12,12,2048", allow_hyphen_values = true)]
    pub grid: SpatialGrid,
    /// mu,nu (repeatable)
    #[arg(long = "direction", value_parser = parse_pair, allow_hyphen_values = true)]
    pub directions: Vec<(f64, f64)>,
    /// Also add unit directions at this many quasi-uniform angles.
    #[arg(long, default_value_t = 0)]
    pub quasi_uniform: usize,
    /// Relative standard deviation of multiplicative Gaussian noise.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Nodes,
    Piecewise,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Nodes => "nodes",
            Method::Piecewise => "piecewise",
        }
    }
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Segment boundaries; detected from the position slice when omitted
    /// with the node method.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub breakpoints: Option<FloatList>,
    #[arg(long, value_enum, default_value_t = Method::Nodes)]
    pub method: Method,
    /// Ground-truth state (preset or file) for the fidelity field.
    #[arg(long)]
    pub truth: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long, value_parser = parse_profile, default_value = "constant:1")]
    pub omega: TimeProfile,
    #[arg(long, value_parser = parse_profile, default_value = "constant:0")]
    pub force: TimeProfile,
    #[arg(long)]
    pub t_max: f64,
    #[arg(long, default_value_t = tomokit::dynamics::DEFAULT_DT)]
    pub dt: f64,
    /// Times at which to recover the initial tomogram.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub recover_at: Option<FloatList>,
    /// Initial state; its position history comes from the exact propagator
    /// (constant profiles only).
    #[arg(long, conflicts_with = "history")]
    pub state: Option<String>,
    #[arg(long, value_parser = parse_grid, default_value = "-12,12,2048", allow_hyphen_values = true)]
    pub grid: SpatialGrid,
    /// Directory of `history_*.csv` position slices tagged with `t=`.
    #[arg(long)]
    pub history: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub assume_pure: bool,
    #[arg(long)]
    pub out: PathBuf,
}

fn numbers(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| {
            let x: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad number {v:?} in {s:?}")))?;
            if !x.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite value in {s:?}")));
            }
            Ok(x)
        })
        .collect()
}

/// Comma-separated numbers given as one argument.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatList(pub Vec<f64>);

pub fn parse_list(s: &str) -> Result<FloatList> {
    if s.trim().is_empty() {
        return Ok(FloatList(Vec::new()));
    }
    numbers(s).map(FloatList)
}

pub fn parse_pair(s: &str) -> Result<(f64, f64)> {
    match numbers(s)?.as_slice() {
        &[a, b] => Ok((a, b)),
        _ => Err(Error::InvalidArgument(format!("expected mu,nu, got {s:?}"))),
    }
}

pub fn parse_grid(s: &str) -> Result<SpatialGrid> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "expected x_min,x_max,n_points, got {s:?}"
        )));
    }
    let lo = numbers(parts[0])?[0];
    let hi = numbers(parts[1])?[0];
    let n: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad point count {:?}", parts[2])))?;
    tomokit::make_grid(lo, hi, n)
}

pub fn parse_profile(s: &str) -> Result<TimeProfile> {
    s.parse()
}
