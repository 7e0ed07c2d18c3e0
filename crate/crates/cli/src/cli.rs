//! Command-line definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}"))).collect()
}

fn parse_fixed<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let v = parse_list(s)?;
    v.try_into().map_err(|v: Vec<f64>| format!("expected {N} comma-separated numbers, got {}", v.len()))
}

pub fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    parse_fixed::<2>(s)
}

pub fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    parse_fixed::<3>(s)
}

fn parse_counts(s: &str) -> Result<Vec<usize>, String> {
    s.split(',').map(|p| p.trim().parse::<usize>().map_err(|e| format!("'{p}': {e}"))).collect()
}

pub fn parse_dims2(s: &str) -> Result<[usize; 2], String> {
    parse_counts(s)?.try_into().map_err(|v: Vec<usize>| format!("expected 2 sizes, got {}", v.len()))
}

pub fn parse_dims3(s: &str) -> Result<[usize; 3], String> {
    parse_counts(s)?.try_into().map_err(|v: Vec<usize>| format!("expected 3 sizes, got {}", v.len()))
}

/// Comma-separated list kept as one value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct List<T>(pub Vec<T>);

pub fn parse_scales(s: &str) -> Result<List<f64>, String> {
    parse_list(s).map(List)
}

pub fn parse_ids(s: &str) -> Result<List<usize>, String> {
    parse_counts(s).map(List)
}

#[derive(Debug, Parser)]
#[command(name = "srgeo", version, about = "Sub-Riemannian geodesics on SO(3) and tracking in spherical images")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distortion figures of the schematic eye and point mappings.
    Optics(OpticsArgs),
    /// Exact geodesic from the identity.
    Geodesic(GeodesicArgs),
    /// First cusp time of a geodesic.
    Cusp(CuspArgs),
    /// Endpoints of all geodesics of a given length.
    Wavefront(WavefrontArgs),
    /// Distance map from a seed by fast marching.
    Fastmarch(FastmarchArgs),
    /// Backtrack a geodesic through a distance map.
    Track(TrackArgs),
    /// Cost map from an image.
    Cost(CostArgs),
    /// SE(2) and SO(3) tracks between the same planar endpoints.
    Compare(CompareArgs),
    /// Sub-Riemannian and isotropic Riemannian tracks on the same cost.
    RiemannCompare(RiemannCompareArgs),
    /// Run the acceptance criteria.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EyeArgs {
    /// Schematic eye as `a,c,eta`.
    #[arg(long, value_parser = parse_triple, default_value = "0.6190476190476191,0.8,1")]
    pub eye: [f64; 3],
    /// Maximal camera half-angle in radians.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_8)]
    pub psi: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OpticsArgs {
    #[command(flatten)]
    pub eye: EyeArgs,
    /// Sphere chart point `x,y` to project to the camera plane.
    #[arg(long, value_parser = parse_pair)]
    pub project: Option<[f64; 2]>,
    /// Camera plane point `X,Y` to map back to the sphere.
    #[arg(long, value_parser = parse_pair)]
    pub unproject: Option<[f64; 2]>,
    /// Write the report as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GeodesicArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub h2: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub h3: f64,
    #[arg(long)]
    pub xi: f64,
    /// `closed-form` or `ode`.
    #[arg(long, default_value = "closed-form")]
    pub method: String,
    /// Parameter of the output, `t` (SR arclength) or `s` (spherical arclength).
    #[arg(long, default_value = "t")]
    pub param: String,
    /// Final parameter value.
    #[arg(long)]
    pub end: f64,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CuspArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub h2: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub h3: f64,
    #[arg(long)]
    pub xi: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WavefrontArgs {
    #[arg(long)]
    pub xi: f64,
    /// Length of the geodesics.
    #[arg(long)]
    pub t: f64,
    /// Samples per momentum axis.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 40.0)]
    pub c_max: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FastmarchArgs {
    /// `so3` or `se2`.
    #[arg(long, default_value = "so3")]
    pub preset: String,
    /// Grid dimensions `nx,ny,ntheta` (odd).
    #[arg(long, value_parser = parse_dims3, default_value = "101,201,201")]
    pub grid: [usize; 3],
    /// Half-widths `x,y` of a window; the whole group when absent (so3 only).
    #[arg(long, value_parser = parse_pair)]
    pub window: Option<[f64; 2]>,
    #[arg(long, default_value_t = 1.5)]
    pub xi: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true, default_value = "0,0,0")]
    pub seed: [f64; 3],
    /// Cost map written by the `cost` subcommand; uniform cost 1 when absent.
    #[arg(long)]
    pub cost: Option<PathBuf>,
    /// Forward-only motion along X1.
    #[arg(long)]
    pub cuspless: bool,
    /// Registered solver name.
    #[arg(long, default_value = "fast-marching")]
    pub solver: String,
    /// Stop once the front passes this distance.
    #[arg(long)]
    pub stop_radius: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrackArgs {
    #[arg(long)]
    pub dist: PathBuf,
    /// Endpoint `x,y,theta`.
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    pub end: [f64; 3],
    /// Use the cuspless descent even on a map solved without it.
    #[arg(long)]
    pub cuspless: bool,
    #[command(flatten)]
    pub eye: EyeArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CostArgs {
    #[arg(long)]
    pub image: PathBuf,
    /// Scales `s = sigma^2/2` in pixels.
    #[arg(long, value_parser = parse_scales, default_value = "2,3,4,5")]
    pub scales: List<f64>,
    #[arg(long, default_value_t = 0.3)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.3)]
    pub c: f64,
    #[arg(long, default_value_t = 50.0)]
    pub lambda: f64,
    #[command(flatten)]
    pub eye: EyeArgs,
    /// Image laid out over the camera plane (`planar`) or the sphere chart (`spherical`).
    #[arg(long, default_value = "planar")]
    pub coords: String,
    /// Pixel size for `--coords spherical`, in radians.
    #[arg(long)]
    pub pixel_size: Option<f64>,
    /// Cost grid dimensions `nx,ny`; use the first two of the solver grid.
    #[arg(long, value_parser = parse_dims2, default_value = "101,101")]
    pub grid: [usize; 2],
    /// Half-widths `x,y` of the cost grid on the sphere chart.
    #[arg(long, value_parser = parse_pair, default_value = "0.7,0.7")]
    pub window: [f64; 2],
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CompareArgs {
    /// Planar start `X,Y,Theta`.
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    pub v0: [f64; 3],
    /// Planar end `X,Y,Theta`.
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    pub v1: [f64; 3],
    #[arg(long, default_value_t = 1.0)]
    pub xi: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[command(flatten)]
    pub eye: EyeArgs,
    /// Grid `n,n,ntheta` used for both groups.
    #[arg(long, value_parser = parse_dims3, default_value = "101,101,81")]
    pub grid: [usize; 3],
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RiemannCompareArgs {
    /// Image to build the cost from; a synthetic scene of two parallel tubes when absent.
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// Planar start `X,Y,Theta`; defaults to the synthetic scene's seeded tube.
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    pub v0: Option<[f64; 3]>,
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    pub v1: Option<[f64; 3]>,
    #[arg(long, default_value_t = 3.0)]
    pub xi: f64,
    #[arg(long, default_value_t = 50.0)]
    pub lambda: f64,
    /// Sub-Riemannian approximation parameter; the Riemannian run uses 1.
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, value_parser = parse_triple, default_value = "0.6190476190476191,0.8,2")]
    pub eye: [f64; 3],
    #[arg(long, value_parser = parse_dims3, default_value = "101,101,81")]
    pub grid: [usize; 3],
    #[arg(long, value_parser = parse_pair, default_value = "0.7,0.7")]
    pub window: [f64; 2],
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    /// Criteria to run, e.g. `1,2,6`; all when absent.
    #[arg(long, value_parser = parse_ids)]
    pub only: Option<List<usize>>,
    /// Multiply the constant in front of the y-tilde integral (mutation check).
    #[arg(long)]
    pub ytilde_factor: Option<f64>,
    /// Override ε in the fast-marching comparison.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Use the 201×401×401 grid for the fast-marching comparison.
    #[arg(long)]
    pub full: bool,
    /// Write the JSON verdict here as well as to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
