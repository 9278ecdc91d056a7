//! Command-line surface.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use gradkit::synth::{NoiseModel, SurfaceKind};
use gradkit::CameraModel;

use crate::methods::{BoundaryArg, IntegrationMethod};

#[derive(Debug, Parser)]
#[command(name = "gradkit", version, about = "Integrate normal and gradient fields into depth maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a normal map into a gradient field.
    Convert(ConvertArgs),
    /// Integrate a gradient field into a depth map.
    Integrate(IntegrateArgs),
    /// Generate a synthetic surface with its exact gradient.
    Synth(SynthArgs),
    /// Compare an estimated depth map with ground truth.
    Eval(EvalArgs),
    /// Run the benchmark suite.
    Bench(BenchArgs),
}

#[derive(Debug, clap::Args)]
pub struct ConvertArgs {
    /// Three-channel PFM normal map.
    #[arg(long)]
    pub normals: PathBuf,
    /// `ortho`, `weak:M` or `persp:F,U0,V0`.
    #[arg(long, value_parser = parse_camera)]
    pub camera: CameraModel,
    /// Output gradient prefix (writes PREFIX.p.pfm and PREFIX.q.pfm).
    #[arg(long)]
    pub out: PathBuf,
    /// Occluding-contour tolerance.
    #[arg(long, default_value_t = gradkit::camera::DEFAULT_EPS)]
    pub eps: f64,
}

#[derive(Debug, clap::Args)]
pub struct IntegrateArgs {
    /// Gradient prefix (reads PREFIX.p.pfm and PREFIX.q.pfm).
    #[arg(long)]
    pub grad: PathBuf,
    /// PGM mask of the reconstruction domain.
    #[arg(long)]
    pub mask: Option<PathBuf>,
    /// `path`, `multipath:N`, `hb`, `dc`, `fc`, `dft`, `dst` or `dct`.
    #[arg(long)]
    pub method: IntegrationMethod,
    /// `natural`, `periodic`, `dirichlet:FILE` or `neumann:FILE`.
    #[arg(long, default_value = "natural")]
    pub bc: BoundaryArg,
    /// Stopping threshold on the largest update of the iterative methods.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output depth map (PFM).
    #[arg(long)]
    pub out: PathBuf,
    /// Optional grayscale preview.
    #[arg(long)]
    pub png: Option<PathBuf>,
}

/// Synthetic input family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SynthKind {
    Surface(SurfaceKind),
    /// `cos(ωu) e^{ωv}`.
    Harmonic(f64),
}

#[derive(Debug, clap::Args)]
pub struct SynthArgs {
    /// `vase`, `peaks`, `plane:a,b`, `sine:kx,ky` or `harmonic:ω`.
    #[arg(long, value_parser = parse_synth_kind)]
    pub kind: SynthKind,
    /// Raster size `MxN` (width x height).
    #[arg(long, value_parser = parse_size)]
    pub size: (usize, usize),
    /// Output prefix.
    #[arg(long)]
    pub out_prefix: PathBuf,
    /// `gradient:σ` or `normal:σ` (radians).
    #[arg(long, value_parser = parse_noise)]
    pub noise: Option<NoiseModel>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, clap::Args)]
pub struct EvalArgs {
    /// Estimated depth map (PFM).
    #[arg(long)]
    pub est: PathBuf,
    /// Ground-truth depth map (PFM).
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long)]
    pub mask: Option<PathBuf>,
    /// Input gradient prefix, for the integrability and residual columns.
    #[arg(long)]
    pub grad: Option<PathBuf>,
    /// Boundary condition of the residual system.
    #[arg(long, default_value = "natural")]
    pub bc: BoundaryArg,
    /// Output CSV report.
    #[arg(long)]
    pub report: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct BenchArgs {
    #[arg(long, default_value = "default", value_parser = ["default"])]
    pub suite: String,
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.trim().parse().map_err(|_| format!("invalid number '{s}'"))
}

fn parse_camera(s: &str) -> Result<CameraModel, String> {
    if s == "ortho" {
        return Ok(CameraModel::Orthographic);
    }
    if let Some(m) = s.strip_prefix("weak:") {
        return Ok(CameraModel::WeakPerspective {
            magnification: parse_f64(m)?,
        });
    }
    if let Some(rest) = s.strip_prefix("persp:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if let [f, u0, v0] = parts.as_slice() {
            return Ok(CameraModel::Perspective {
                focal: parse_f64(f)?,
                principal_point: (parse_f64(u0)?, parse_f64(v0)?),
            });
        }
        return Err(format!("expected persp:F,U0,V0, got '{s}'"));
    }
    Err(format!("unknown camera '{s}'"))
}

fn parse_synth_kind(s: &str) -> Result<SynthKind, String> {
    if let Some(omega) = s.strip_prefix("harmonic:") {
        return parse_f64(omega).map(SynthKind::Harmonic);
    }
    s.parse::<SurfaceKind>().map(SynthKind::Surface).map_err(|e| e.to_string())
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (m, n) = s.split_once('x').ok_or_else(|| format!("expected MxN, got '{s}'"))?;
    let parse = |x: &str| x.parse::<usize>().map_err(|_| format!("invalid size '{s}'"));
    let (m, n) = (parse(m)?, parse(n)?);
    if m == 0 || n == 0 {
        return Err(format!("size must be positive, got '{s}'"));
    }
    Ok((m, n))
}

fn parse_noise(s: &str) -> Result<NoiseModel, String> {
    let (kind, sigma) = s.split_once(':').ok_or_else(|| format!("expected KIND:σ, got '{s}'"))?;
    let sigma = parse_f64(sigma)?;
    if sigma.is_nan() || sigma < 0.0 {
        return Err(format!("noise level must be non-negative, got {sigma}"));
    }
    match kind {
        "gradient" => Ok(NoiseModel::GradientGaussian { sigma }),
        "normal" => Ok(NoiseModel::NormalAngleGaussian { sigma }),
        _ => Err(format!("unknown noise model '{kind}'")),
    }
}
