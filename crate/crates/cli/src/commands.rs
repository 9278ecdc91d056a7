//! Subcommand implementations.

use std::path::{Path, PathBuf};

use gradkit::camera::normals_to_gradient;
use gradkit::metrics::{e_int, rmse_offset_aligned, stencil_residual, ResidualSystem};
use gradkit::synth::{
    add_gradient_noise, add_normal_noise, harmonic_gradient, make_harmonic, make_surface, HarmonicFamily, NoiseModel,
};
use gradkit::{io, CameraModel, DomainMask, Error, FormatError, GradientField, NormalField, Result, ScalarGrid};

use crate::args::{Command, ConvertArgs, EvalArgs, IntegrateArgs, SynthArgs, SynthKind};
use crate::bench;
use crate::methods::{integrate, Boundary, RunOptions};

/// Process exit code for an error: 2 for usage and configuration errors,
/// 1 for everything else.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Usage(_) | Error::Config(_) => 2,
        _ => 1,
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Convert(args) => convert(&args),
        Command::Integrate(args) => run_integrate(&args),
        Command::Synth(args) => synth(&args),
        Command::Eval(args) => eval(&args).map(|_| ()),
        Command::Bench(args) => {
            let summary = bench::run_default_suite(&args.out_dir)?;
            println!(
                "bench: {} rows in {:.1} s, report {}",
                summary.rows.len(),
                summary.total_time_s,
                summary.report.display()
            );
            Ok(())
        }
    }
}

pub(crate) fn csv_error(path: &Path, err: csv::Error) -> Error {
    FormatError::Invalid {
        path: path.to_path_buf(),
        reason: format!("cannot write CSV: {err}"),
    }
    .into()
}

/// Write a CSV file with a header row.
pub(crate) fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    writer.write_record(header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        writer.write_record(row).map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(|e| {
        Error::from(FormatError::Io {
            path: path.to_path_buf(),
            source: e,
        })
    })
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

fn convert(args: &ConvertArgs) -> Result<()> {
    let nf = io::read_normals(&args.normals)?;
    let converted = normals_to_gradient(&nf, &args.camera, args.eps)?;
    io::write_gradient(&args.out, &converted.gradient)?;
    let occluding = converted.occluding.iter().filter(|&&x| x).count();
    let quantity = if args.camera.integrates_log_depth() { "log-depth" } else { "depth" };
    println!(
        "convert: {} pixels, {occluding} occluding, gradient of {quantity}",
        converted.gradient.mask.count_inside()
    );
    Ok(())
}

fn run_integrate(args: &IntegrateArgs) -> Result<()> {
    let mask = args.mask.as_ref().map(io::read_mask).transpose()?;
    let g = io::read_gradient(&args.grad, mask)?;
    let bc = Boundary::load(&args.bc)?;
    let opts = RunOptions {
        tol: args.tol,
        max_iters: args.max_iters,
        seed: args.seed,
    };
    let result = integrate(&g, args.method, &bc, &opts)?;
    io::write_pfm(&args.out, &result.depth, Some(&g.mask))?;
    if let Some(png) = &args.png {
        let (lo, hi) = io::write_png_preview(png, &result.depth, &g.mask)?;
        println!("preview {}: depth range [{lo}, {hi}]", png.display());
    }
    match result.iterations {
        Some(iterations) if !result.converged => {
            eprintln!("warning: {} did not converge within {iterations} iterations", args.method)
        }
        Some(iterations) => println!("integrate: {} converged in {iterations} iterations", args.method),
        None => println!("integrate: {} done", args.method),
    }
    Ok(())
}

/// Synthetic sample set.
#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub depth: ScalarGrid,
    /// Exact (or noisy) gradient on the full raster.
    pub gradient: GradientField,
    /// Reconstruction domain (silhouette for the vase).
    pub mask: DomainMask,
    pub normals: NormalField,
}

/// Generate a synthetic depth map, its gradient and normals, with optional
/// noise.
pub fn generate(kind: SynthKind, size: (usize, usize), noise: Option<NoiseModel>, seed: u64) -> Result<SynthOutput> {
    let (m, n) = size;
    let (depth, exact, mask) = match kind {
        SynthKind::Surface(kind) => {
            let s = make_surface(kind, m, n)?;
            let mask = s.gradient.mask.clone();
            let full = GradientField::full(s.gradient.p, s.gradient.q)?;
            (s.depth, full, mask)
        }
        SynthKind::Harmonic(omega) => (
            make_harmonic(HarmonicFamily::CosExp, omega, m, n)?,
            harmonic_gradient(HarmonicFamily::CosExp, omega, m, n)?,
            DomainMask::full(m, n),
        ),
    };
    let (gradient, normals) = match noise {
        None => {
            let normals = NormalField::from_gradient(&exact)?;
            (exact, normals)
        }
        Some(NoiseModel::GradientGaussian { sigma }) => {
            let noisy = add_gradient_noise(&exact, sigma, seed)?;
            let normals = NormalField::from_gradient(&noisy)?;
            (noisy, normals)
        }
        Some(NoiseModel::NormalAngleGaussian { sigma }) => {
            let normals = add_normal_noise(&NormalField::from_gradient(&exact)?, sigma, seed)?;
            let converted = normals_to_gradient(&normals, &CameraModel::Orthographic, gradkit::camera::DEFAULT_EPS)?;
            (converted.gradient, normals)
        }
    };
    Ok(SynthOutput {
        depth,
        gradient,
        mask,
        normals,
    })
}

fn synth(args: &SynthArgs) -> Result<()> {
    let out = generate(args.kind, args.size, args.noise, args.seed)?;
    let prefix = &args.out_prefix;
    io::write_pfm(with_suffix(prefix, ".z.pfm"), &out.depth, None)?;
    io::write_gradient(prefix, &out.gradient)?;
    io::write_mask(with_suffix(prefix, ".mask.pgm"), &out.mask)?;
    io::write_normals(with_suffix(prefix, ".normals.pfm"), &out.normals)?;
    println!(
        "synth: wrote {0}.z.pfm, {0}.p.pfm, {0}.q.pfm, {0}.mask.pgm, {0}.normals.pfm",
        prefix.display()
    );
    Ok(())
}

/// One evaluation, as written to the report.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub rmse: f64,
    pub offset: f64,
    /// `max - min` of the ground truth over the domain.
    pub depth_range: f64,
    /// RMSE above 10% of the depth range, the signature of a periodic
    /// reconstruction of non-periodic data.
    pub periodic_bias: bool,
    pub e_int: Option<f64>,
    pub stencil_residual: Option<f64>,
    pub pixels: usize,
}

pub const EVAL_HEADER: [&str; 8] = [
    "rmse",
    "offset",
    "depth_range",
    "relative_rmse",
    "periodic_bias",
    "e_int",
    "stencil_residual",
    "pixels",
];

fn optional(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn eval(args: &EvalArgs) -> Result<EvalReport> {
    let est = io::read_pfm(&args.est)?;
    let gt = io::read_pfm(&args.gt)?;
    if est.dims() != gt.dims() {
        return Err(FormatError::DimensionMismatch {
            path: args.est.clone(),
            offset: 3,
            expected_width: gt.width(),
            expected_height: gt.height(),
            width: est.width(),
            height: est.height(),
        }
        .into());
    }
    let mask = match &args.mask {
        Some(path) => io::read_mask(path)?,
        None => {
            let (w, h) = gt.dims();
            DomainMask::from_fn(w, h, |u, v| est.get(u, v).is_finite() && gt.get(u, v).is_finite())
                .map_err(|_| Error::Data("estimate and ground truth share no finite pixel".into()))?
        }
    };
    for (u, v) in mask.inside_pixels() {
        if !est.get(u, v).is_finite() || !gt.get(u, v).is_finite() {
            return Err(Error::Data(format!("depth is not finite at inside pixel ({u}, {v})")));
        }
    }
    let aligned = rmse_offset_aligned(&est, &gt, &mask)?;
    let (lo, hi) = gt.range_on(&mask);
    let depth_range = hi - lo;
    let (e, residual) = match &args.grad {
        Some(prefix) => {
            let g = io::read_gradient(prefix, Some(mask.clone()))?;
            let system = match Boundary::load(&args.bc)? {
                Boundary::Natural => ResidualSystem::Natural,
                bc => ResidualSystem::Rectangular(bc.spec()),
            };
            let shifted = est.masked(&mask)?;
            (Some(e_int(&g)), Some(stencil_residual(&shifted, &g, &system)?))
        }
        None => (None, None),
    };
    let report = EvalReport {
        rmse: aligned.rmse,
        offset: aligned.offset,
        depth_range,
        periodic_bias: aligned.rmse > 0.1 * depth_range,
        e_int: e,
        stencil_residual: residual,
        pixels: mask.count_inside(),
    };
    let relative = if depth_range > 0.0 { report.rmse / depth_range } else { 0.0 };
    let row = vec![
        report.rmse.to_string(),
        report.offset.to_string(),
        report.depth_range.to_string(),
        relative.to_string(),
        report.periodic_bias.to_string(),
        optional(report.e_int),
        optional(report.stencil_residual),
        report.pixels.to_string(),
    ];
    write_csv(&args.report, &EVAL_HEADER, &[row])?;
    println!(
        "eval: rmse {} over {} pixels (range {}){}",
        report.rmse,
        report.pixels,
        report.depth_range,
        if report.periodic_bias { ", periodic bias" } else { "" }
    );
    Ok(report)
}
