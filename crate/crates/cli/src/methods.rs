//! Integration methods selectable from the command line and the bench.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use gradkit::iterative::{assemble_system, assemble_system_with_fixed, Initial, Method, SolverConfig};
use gradkit::path::{integrate_multipath, integrate_path, SweepOrder};
use gradkit::spectral::{self, BoundarySpec, FcConvention, NeumannData};
use gradkit::{io, Error, GradientField, Result, ScalarGrid};

/// Integrator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrationMethod {
    /// Single row-major path.
    Path,
    /// Average over `n` monotone paths.
    Multipath(usize),
    /// Least squares, Jacobi iterations.
    Hb,
    /// Least squares, red-black SOR iterations.
    Dc,
    /// Continuous Fourier projection.
    Fc,
    /// Discrete Poisson solve, periodic.
    Dft,
    /// Discrete Poisson solve, Dirichlet.
    Dst,
    /// Discrete Poisson solve, Neumann.
    Dct,
}

impl IntegrationMethod {
    /// Every method, with the multipath variant at 16 paths.
    pub const ALL: [IntegrationMethod; 8] = [
        IntegrationMethod::Path,
        IntegrationMethod::Multipath(16),
        IntegrationMethod::Hb,
        IntegrationMethod::Dc,
        IntegrationMethod::Fc,
        IntegrationMethod::Dft,
        IntegrationMethod::Dst,
        IntegrationMethod::Dct,
    ];

    /// Whether the method only runs on a full rectangle.
    pub fn needs_rectangle(self) -> bool {
        matches!(
            self,
            IntegrationMethod::Fc | IntegrationMethod::Dft | IntegrationMethod::Dst | IntegrationMethod::Dct
        )
    }
}

impl fmt::Display for IntegrationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntegrationMethod::Path => write!(f, "path"),
            IntegrationMethod::Multipath(n) => write!(f, "multipath:{n}"),
            IntegrationMethod::Hb => write!(f, "hb"),
            IntegrationMethod::Dc => write!(f, "dc"),
            IntegrationMethod::Fc => write!(f, "fc"),
            IntegrationMethod::Dft => write!(f, "dft"),
            IntegrationMethod::Dst => write!(f, "dst"),
            IntegrationMethod::Dct => write!(f, "dct"),
        }
    }
}

impl FromStr for IntegrationMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "path" => IntegrationMethod::Path,
            "hb" => IntegrationMethod::Hb,
            "dc" => IntegrationMethod::Dc,
            "fc" => IntegrationMethod::Fc,
            "dft" => IntegrationMethod::Dft,
            "dst" => IntegrationMethod::Dst,
            "dct" => IntegrationMethod::Dct,
            _ => match s.strip_prefix("multipath:") {
                Some(n) => {
                    let n: usize = n.parse().map_err(|_| format!("invalid path count in '{s}'"))?;
                    if n < 2 {
                        return Err(format!("multipath needs at least 2 paths, got {n}"));
                    }
                    IntegrationMethod::Multipath(n)
                }
                None => return Err(format!("unknown method '{s}'")),
            },
        })
    }
}

/// Boundary condition as named on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundaryArg {
    Natural,
    Periodic,
    Dirichlet(PathBuf),
    Neumann(PathBuf),
}

impl FromStr for BoundaryArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "natural" => Ok(BoundaryArg::Natural),
            "periodic" => Ok(BoundaryArg::Periodic),
            _ => match s.split_once(':') {
                Some(("dirichlet", file)) if !file.is_empty() => Ok(BoundaryArg::Dirichlet(file.into())),
                Some(("neumann", file)) if !file.is_empty() => Ok(BoundaryArg::Neumann(file.into())),
                _ => Err(format!("unknown boundary condition '{s}'")),
            },
        }
    }
}

/// Boundary data resolved to grids.
#[derive(Debug, Clone, PartialEq)]
pub enum Boundary {
    Natural,
    Periodic,
    Dirichlet(ScalarGrid),
    Neumann(ScalarGrid),
}

impl Boundary {
    pub fn load(arg: &BoundaryArg) -> Result<Self> {
        Ok(match arg {
            BoundaryArg::Natural => Boundary::Natural,
            BoundaryArg::Periodic => Boundary::Periodic,
            BoundaryArg::Dirichlet(path) => Boundary::Dirichlet(io::read_pfm(path)?),
            BoundaryArg::Neumann(path) => Boundary::Neumann(io::read_pfm(path)?),
        })
    }

    fn name(&self) -> &'static str {
        match self {
            Boundary::Natural => "natural",
            Boundary::Periodic => "periodic",
            Boundary::Dirichlet(_) => "dirichlet",
            Boundary::Neumann(_) => "neumann",
        }
    }

    /// The rectangular boundary specification this condition denotes.
    pub fn spec(&self) -> BoundarySpec {
        match self {
            Boundary::Natural => BoundarySpec::NeumannNatural,
            Boundary::Periodic => BoundarySpec::Periodic,
            Boundary::Dirichlet(b) => BoundarySpec::Dirichlet(b.clone()),
            Boundary::Neumann(b) => BoundarySpec::Neumann(b.clone()),
        }
    }
}

/// Iteration and randomness controls.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub tol: Option<f64>,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            tol: None,
            max_iters: 100_000,
            seed: 0,
        }
    }
}

/// Result of one integration.
#[derive(Debug, Clone)]
pub struct Integration {
    pub depth: ScalarGrid,
    /// Sweep count of the iterative methods.
    pub iterations: Option<usize>,
    pub converged: bool,
    /// Seconds spent in the solver call alone.
    pub wall_time_s: f64,
}

fn unsupported(method: IntegrationMethod, bc: &Boundary) -> Error {
    Error::Usage(format!(
        "method '{method}' does not support the '{}' boundary condition",
        bc.name()
    ))
}

/// Run `method` on `g` with boundary condition `bc`.
pub fn integrate(g: &GradientField, method: IntegrationMethod, bc: &Boundary, opts: &RunOptions) -> Result<Integration> {
    g.check_finite()?;
    let direct = |depth: ScalarGrid, start: Instant| Integration {
        depth,
        iterations: None,
        converged: true,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    match method {
        IntegrationMethod::Path | IntegrationMethod::Multipath(_) => {
            if *bc != Boundary::Natural {
                return Err(unsupported(method, bc));
            }
            let origin = g.mask.inside_pixels().next().expect("masks have an inside pixel");
            let start = Instant::now();
            let depth = match method {
                IntegrationMethod::Multipath(n) => integrate_multipath(g, origin, n, opts.seed)?,
                _ => integrate_path(g, origin, SweepOrder::RowMajor)?,
            };
            Ok(direct(depth, start))
        }
        IntegrationMethod::Hb | IntegrationMethod::Dc => {
            let system = match bc {
                Boundary::Natural => assemble_system(g)?,
                Boundary::Dirichlet(fixed) => assemble_system_with_fixed(g, fixed)?,
                _ => return Err(unsupported(method, bc)),
            };
            let (w, h) = g.dims();
            let cfg = SolverConfig {
                method: if method == IntegrationMethod::Hb {
                    Method::Jacobi
                } else {
                    Method::sor_for(w, h)
                },
                tol: opts.tol,
                max_iters: opts.max_iters,
                initial: Initial::Zeros,
            };
            let start = Instant::now();
            let (depth, report) = system.solve(&cfg)?;
            Ok(Integration {
                depth,
                iterations: Some(report.iterations),
                converged: report.converged,
                wall_time_s: start.elapsed().as_secs_f64(),
            })
        }
        IntegrationMethod::Fc => {
            if !matches!(bc, Boundary::Natural | Boundary::Periodic) {
                return Err(unsupported(method, bc));
            }
            let start = Instant::now();
            let depth = spectral::solve_fc_continuous(g, FcConvention::Pulsation)?;
            Ok(direct(depth, start))
        }
        IntegrationMethod::Dft => {
            if !matches!(bc, Boundary::Natural | Boundary::Periodic) {
                return Err(unsupported(method, bc));
            }
            let start = Instant::now();
            let depth = spectral::solve_scs_periodic(g)?;
            Ok(direct(depth, start))
        }
        IntegrationMethod::Dst => match bc {
            Boundary::Dirichlet(b) => {
                let start = Instant::now();
                let depth = spectral::solve_scs_dirichlet(g, b)?;
                Ok(direct(depth, start))
            }
            _ => Err(Error::Usage(
                "method 'dst' needs Dirichlet data: pass --bc dirichlet:FILE".into(),
            )),
        },
        IntegrationMethod::Dct => {
            let start = Instant::now();
            let depth = match bc {
                Boundary::Natural => spectral::solve_scs_neumann(g, NeumannData::Natural)?,
                Boundary::Neumann(b) => spectral::solve_scs_neumann(g, NeumannData::Given(b))?,
                _ => return Err(unsupported(method, bc)),
            };
            Ok(direct(depth, start))
        }
    }
}
