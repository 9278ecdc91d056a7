//! Benchmark harness: every method on smooth and discontinuous surfaces at
//! several gradient noise levels.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use gradkit::iterative::energy_f_l2;
use gradkit::metrics::{e_int, rmse_offset_aligned};
use gradkit::spectral::{solve_scs_neumann, NeumannData};
use gradkit::synth::{add_gradient_noise, make_harmonic, make_surface, HarmonicFamily, SurfaceKind};
use gradkit::{io, DomainMask, FormatError, GradientField, Result, ScalarGrid};

use crate::commands::write_csv;
use crate::methods::{integrate, Boundary, IntegrationMethod, RunOptions};

/// Columns of the main report.
pub const BENCH_HEADER: [&str; 7] = ["method", "domain", "sigma", "rmse", "e_int", "wall_time_s", "iterations"];

/// Gradient noise levels of the default suite.
pub const NOISE_LEVELS: [f64; 4] = [0.0, 0.01, 0.05, 0.1];

/// Raster size of the default suite.
pub const SIZE: usize = 128;

/// Iteration cap of the default suite.
pub const MAX_ITERS: usize = 10_000;

/// One row of the report.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub method: IntegrationMethod,
    pub domain: &'static str,
    pub sigma: f64,
    pub rmse: f64,
    pub e_int: f64,
    pub wall_time_s: f64,
    pub iterations: Option<usize>,
}

/// Outcome of a suite run.
#[derive(Debug, Clone)]
pub struct BenchSummary {
    pub rows: Vec<BenchRow>,
    pub report: PathBuf,
    pub total_time_s: f64,
}

struct Case {
    name: &'static str,
    depth: ScalarGrid,
    gradient: GradientField,
}

fn cases() -> Result<Vec<Case>> {
    let peaks = make_surface(SurfaceKind::PeaksSmooth, SIZE, SIZE)?;
    let vase = make_surface(SurfaceKind::Vase, SIZE, SIZE)?;
    let full = DomainMask::full(SIZE, SIZE);
    Ok(vec![
        Case {
            name: "peaks_full",
            depth: peaks.depth.clone(),
            gradient: peaks.gradient.clone(),
        },
        Case {
            name: "vase_full",
            depth: vase.depth.clone(),
            gradient: vase.gradient.with_mask(full)?,
        },
        Case {
            name: "vase_mask",
            depth: vase.depth.clone(),
            gradient: vase.gradient.clone(),
        },
    ])
}

/// Boundary condition each method runs with in the suite. The sine solver
/// receives the ground-truth depth on the outer ring.
fn boundary_for(method: IntegrationMethod, depth: &ScalarGrid) -> Boundary {
    match method {
        IntegrationMethod::Dst => Boundary::Dirichlet(depth.clone()),
        IntegrationMethod::Dft => Boundary::Periodic,
        _ => Boundary::Natural,
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| {
        FormatError::Io {
            path: dir.to_path_buf(),
            source: e,
        }
        .into()
    })
}

/// Run the default suite, writing `bench.csv`, `previews.csv`,
/// `ambiguity.csv` and one PNG preview per row into `out_dir`.
pub fn run_default_suite(out_dir: &Path) -> Result<BenchSummary> {
    let start = Instant::now();
    create_dir(out_dir)?;
    let preview_dir = out_dir.join("previews");
    create_dir(&preview_dir)?;
    let opts = RunOptions {
        tol: None,
        max_iters: MAX_ITERS,
        seed: 1,
    };
    let mut rows = Vec::new();
    let mut previews = Vec::new();
    for case in cases()? {
        for (level, &sigma) in NOISE_LEVELS.iter().enumerate() {
            let g = add_gradient_noise(&case.gradient, sigma, 1000 + level as u64)?;
            let energy = e_int(&g);
            for method in IntegrationMethod::ALL {
                if method.needs_rectangle() && !g.mask.is_full() {
                    continue;
                }
                let bc = boundary_for(method, &case.depth);
                let result = integrate(&g, method, &bc, &opts)?;
                let aligned = rmse_offset_aligned(&result.depth, &case.depth, &g.mask)?;
                let file = format!("{}_{}_s{}.png", case.name, method.to_string().replace(':', ""), sigma);
                let (lo, hi) = io::write_png_preview(preview_dir.join(&file), &result.depth, &g.mask)?;
                previews.push(vec![file, lo.to_string(), hi.to_string()]);
                rows.push(BenchRow {
                    method,
                    domain: case.name,
                    sigma,
                    rmse: aligned.rmse,
                    e_int: energy,
                    wall_time_s: result.wall_time_s,
                    iterations: result.iterations,
                });
            }
        }
    }
    let report = out_dir.join("bench.csv");
    let records: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.method.to_string(),
                r.domain.to_string(),
                r.sigma.to_string(),
                r.rmse.to_string(),
                r.e_int.to_string(),
                format!("{:.6}", r.wall_time_s),
                r.iterations.map(|i| i.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    write_csv(&report, &BENCH_HEADER, &records)?;
    write_csv(&out_dir.join("previews.csv"), &["file", "depth_min", "depth_max"], &previews)?;
    write_csv(
        &out_dir.join("ambiguity.csv"),
        &AMBIGUITY_HEADER,
        &ambiguity_demo()?,
    )?;
    Ok(BenchSummary {
        rows,
        report,
        total_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Columns of the harmonic-ambiguity report.
pub const AMBIGUITY_HEADER: [&str; 5] = [
    "family",
    "omega",
    "energy_solution",
    "energy_with_harmonic",
    "harmonic_laplacian_max",
];

/// Adds unit-amplitude harmonic functions to a least-squares solution: the
/// energy grows by a bounded amount while the discrete Laplacian of the
/// added function is only a fourth-order remainder.
fn ambiguity_demo() -> Result<Vec<Vec<String>>> {
    let n = 64;
    let surface = make_surface(SurfaceKind::PeaksSmooth, n, n)?;
    let z = solve_scs_neumann(&surface.gradient, NeumannData::Natural)?;
    let base = energy_f_l2(&z, &surface.gradient)?;
    let full = DomainMask::full(n, n);
    let interior = DomainMask::from_fn(n, n, |u, v| u > 0 && v > 0 && u + 1 < n && v + 1 < n)?;
    let mut rows = Vec::new();
    for (family, name) in [(HarmonicFamily::CosExp, "cos_exp"), (HarmonicFamily::SinExp, "sin_exp")] {
        for omega in [0.2, 0.1, 0.05] {
            let h = make_harmonic(family, omega, n, n)?;
            let amplitude = h.max_abs_on(&full);
            let h = h.map(|x| x / amplitude);
            let shifted = z.zip_map(&h, |a, b| a + b)?;
            let lap = gradkit::grid::discrete_laplacian(&h, &full)?;
            rows.push(vec![
                name.to_string(),
                omega.to_string(),
                base.to_string(),
                energy_f_l2(&shifted, &surface.gradient)?.to_string(),
                lap.max_abs_on(&interior).to_string(),
            ]);
        }
    }
    Ok(rows)
}
