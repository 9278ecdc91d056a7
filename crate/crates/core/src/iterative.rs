//! Least-squares integration on arbitrary domains.
//!
//! The discrete functional sums, over every horizontal edge `(u,v)-(u+1,v)`
//! inside the domain, `[z(u+1,v) - z(u,v) - (p(u+1,v) + p(u,v)) / 2]^2`, plus
//! the analogous vertical terms. Its optimality condition at pixel `i` reads
//!
//! ```text
//! sum over incident edges (z_j - z_i) = sum over incident edges ±(edge average of p or q)
//! ```
//!
//! with `+` for edges toward `+u`/`+v`. On interior pixels this is the
//! five-point Poisson equation with the central divergence on the right;
//! on boundary pixels it is a discrete natural boundary condition.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{ensure_dims, GradientField, ScalarGrid, OUTSIDE};

/// Sparse normal equations of the least-squares functional.
///
/// Unknowns are ordered red (`(u + v)` even) first, then black, so that a
/// half-sweep of Gauss-Seidel only reads the other color.
#[derive(Debug, Clone)]
pub struct PoissonSystem {
    width: usize,
    height: usize,
    /// Pixel of each unknown.
    pixels: Vec<(usize, usize)>,
    /// Number of red unknowns; black unknowns follow.
    n_red: usize,
    /// Number of incident edges (including edges to fixed pixels).
    degree: Vec<u8>,
    /// CSR neighbor lists over free unknowns, in `+u, -u, +v, -v` order.
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    /// Right-hand side in the form `sum(z_j) - degree * z_i = rhs_i`.
    rhs: Vec<f64>,
    /// Component id of each unknown.
    component: Vec<usize>,
    /// Whether each component touches a fixed pixel (no gauge freedom then).
    component_anchored: Vec<bool>,
    /// Values of fixed pixels; outside marker elsewhere.
    fixed: ScalarGrid,
    gradient: GradientField,
}

/// Weight of the Jacobi update. The stencil graph is bipartite, so the
/// undamped iteration has an eigenvalue of exactly -1 (the checkerboard mode)
/// and never settles; damping maps it to `1 - 2 * JACOBI_DAMPING`.
pub const JACOBI_DAMPING: f64 = 0.9;

/// Iteration scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Simultaneous update, as in the classical Horn and Brooks scheme,
    /// damped by [`JACOBI_DAMPING`].
    Jacobi,
    /// Red-black Gauss-Seidel.
    GaussSeidel,
    /// Red-black successive over-relaxation with factor `omega` in (0, 2).
    Sor { omega: f64 },
}

impl Method {
    /// SOR with the relaxation factor that is optimal for the five-point
    /// Laplacian on a square of side `max(width, height)`.
    pub fn sor_for(width: usize, height: usize) -> Self {
        let n = width.max(height).max(2) as f64;
        Method::Sor {
            omega: 2.0 / (1.0 + (std::f64::consts::PI / n).sin()),
        }
    }
}

/// Starting point of the iteration.
#[derive(Debug, Clone, PartialEq)]
pub enum Initial {
    Zeros,
    Given(ScalarGrid),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    /// Stop once the largest absolute update of a sweep falls below this;
    /// `None` means `1e-8 * max(1, |rhs|_inf)`.
    pub tol: Option<f64>,
    pub max_iters: usize,
    pub initial: Initial,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: Method::GaussSeidel,
            tol: None,
            max_iters: 100_000,
            initial: Initial::Zeros,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if let Method::Sor { omega } = self.method {
            if !(omega > 0.0 && omega < 2.0) {
                return Err(Error::Config(format!(
                    "SOR relaxation factor must lie in (0, 2), got {omega}"
                )));
            }
        }
        if let Some(tol) = self.tol {
            if tol.is_nan() || tol <= 0.0 {
                return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
            }
        }
        Ok(())
    }
}

/// Outcome of [`PoissonSystem::solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub final_max_update: f64,
    /// Least-squares energy of the returned solution.
    pub final_energy: f64,
    pub converged: bool,
}

const RECENTER_EVERY: usize = 1000;

/// Assemble the normal equations of the least-squares functional on `g`'s
/// domain (free boundary everywhere).
pub fn assemble_system(g: &GradientField) -> Result<PoissonSystem> {
    let (w, h) = g.dims();
    assemble(g, ScalarGrid::filled(w, h, OUTSIDE))
}

/// Like [`assemble_system`], but inside pixels where `fixed` is finite are
/// held at that value and eliminated from the unknowns.
pub fn assemble_system_with_fixed(g: &GradientField, fixed: &ScalarGrid) -> Result<PoissonSystem> {
    ensure_dims(g.dims(), fixed.dims())?;
    let fixed = fixed.masked(&g.mask)?;
    assemble(g, fixed)
}

fn assemble(g: &GradientField, fixed: ScalarGrid) -> Result<PoissonSystem> {
    g.check_finite()?;
    let mask = &g.mask;
    let (w, h) = mask.dims();
    let is_fixed = |u: usize, v: usize| fixed.get(u, v).is_finite();

    let mut pixels: Vec<(usize, usize)> = mask
        .inside_pixels()
        .filter(|&(u, v)| (u + v) % 2 == 0 && !is_fixed(u, v))
        .collect();
    let n_red = pixels.len();
    pixels.extend(
        mask.inside_pixels()
            .filter(|&(u, v)| (u + v) % 2 == 1 && !is_fixed(u, v)),
    );

    let mut unknown_of = vec![usize::MAX; w * h];
    for (k, &(u, v)) in pixels.iter().enumerate() {
        unknown_of[v * w + u] = k;
    }

    let components = mask.components();
    let mut component_anchored = vec![false; components.count];
    for (u, v) in mask.inside_pixels() {
        if is_fixed(u, v) {
            component_anchored[components.labels[v * w + u]] = true;
        }
    }

    let mut degree = Vec::with_capacity(pixels.len());
    let mut offsets = Vec::with_capacity(pixels.len() + 1);
    let mut neighbors = Vec::with_capacity(4 * pixels.len());
    let mut rhs = Vec::with_capacity(pixels.len());
    let mut component = Vec::with_capacity(pixels.len());
    offsets.push(0);
    for &(u, v) in &pixels {
        let mut deg = 0u8;
        let mut b = 0.0;
        for (nu, nv) in mask.inside_neighbors(u, v) {
            deg += 1;
            b += signed_edge_average(g, (u, v), (nu, nv));
            if is_fixed(nu, nv) {
                b -= fixed.get(nu, nv);
            } else {
                neighbors.push(unknown_of[nv * w + nu]);
            }
        }
        degree.push(deg);
        rhs.push(b);
        offsets.push(neighbors.len());
        component.push(components.labels[v * w + u]);
    }

    Ok(PoissonSystem {
        width: w,
        height: h,
        pixels,
        n_red,
        degree,
        offsets,
        neighbors,
        rhs,
        component,
        component_anchored,
        fixed,
        gradient: g.clone(),
    })
}

/// `±(edge average)` for the edge from `from` to its neighbor `to`.
#[inline]
fn signed_edge_average(g: &GradientField, from: (usize, usize), to: (usize, usize)) -> f64 {
    if from.1 == to.1 {
        let avg = 0.5 * (g.p.get(from.0, from.1) + g.p.get(to.0, to.1));
        if to.0 > from.0 {
            avg
        } else {
            -avg
        }
    } else {
        let avg = 0.5 * (g.q.get(from.0, from.1) + g.q.get(to.0, to.1));
        if to.1 > from.1 {
            avg
        } else {
            -avg
        }
    }
}

/// One pixel's equation, as exposed by [`PoissonSystem::equation`].
#[derive(Debug, Clone, PartialEq)]
pub struct PixelEquation {
    /// Number of incident edges.
    pub diagonal: usize,
    /// Free neighbors, in `+u, -u, +v, -v` order.
    pub neighbors: Vec<(usize, usize)>,
    /// Right-hand side of `sum(z_neighbors) - diagonal * z = rhs`, with fixed
    /// neighbors already moved over.
    pub rhs: f64,
}

impl PoissonSystem {
    pub fn unknowns(&self) -> usize {
        self.pixels.len()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Equation of the free pixel `(u, v)`, if it is an unknown.
    pub fn equation(&self, u: usize, v: usize) -> Option<PixelEquation> {
        let k = self.pixels.iter().position(|&px| px == (u, v))?;
        Some(PixelEquation {
            diagonal: self.degree[k] as usize,
            neighbors: self.neighbors[self.offsets[k]..self.offsets[k + 1]]
                .iter()
                .map(|&j| self.pixels[j])
                .collect(),
            rhs: self.rhs[k],
        })
    }

    fn rhs_norm(&self) -> f64 {
        self.rhs.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Maximum absolute equation residual at `z`.
    pub fn residual(&self, z: &ScalarGrid) -> f64 {
        (0..self.unknowns())
            .into_par_iter()
            .map(|k| {
                let (u, v) = self.pixels[k];
                let sum: f64 = self.neighbors[self.offsets[k]..self.offsets[k + 1]]
                    .iter()
                    .map(|&j| {
                        let (a, b) = self.pixels[j];
                        z.get(a, b)
                    })
                    .sum();
                (sum - self.degree[k] as f64 * z.get(u, v) - self.rhs[k]).abs()
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Iteratively solve the system.
    ///
    /// Components without a fixed pixel are shifted to zero mean (every
    /// [`RECENTER_EVERY`] iterations and at the end). Failing to reach the
    /// tolerance within `max_iters` is reported, not treated as an error.
    pub fn solve(&self, cfg: &SolverConfig) -> Result<(ScalarGrid, SolveReport)> {
        cfg.validate()?;
        let n = self.unknowns();
        let mut x: Vec<f64> = match &cfg.initial {
            Initial::Zeros => vec![0.0; n],
            Initial::Given(grid) => {
                ensure_dims(self.dims(), grid.dims())?;
                self.pixels
                    .iter()
                    .map(|&(u, v)| {
                        let value = grid.get(u, v);
                        if value.is_finite() {
                            value
                        } else {
                            0.0
                        }
                    })
                    .collect()
            }
        };
        let tol = cfg.tol.unwrap_or(1e-8 * self.rhs_norm().max(1.0));

        let mut iterations = 0;
        let mut max_update = f64::INFINITY;
        let mut scratch = vec![0.0; n];
        while iterations < cfg.max_iters {
            max_update = match cfg.method {
                Method::Jacobi => self.jacobi_sweep(&x, &mut scratch),
                Method::GaussSeidel => self.red_black_sweep(&mut x, 1.0),
                Method::Sor { omega } => self.red_black_sweep(&mut x, omega),
            };
            if cfg.method == Method::Jacobi {
                std::mem::swap(&mut x, &mut scratch);
            }
            iterations += 1;
            if max_update < tol {
                break;
            }
            if iterations % RECENTER_EVERY == 0 {
                self.recenter(&mut x);
            }
        }
        self.recenter(&mut x);

        let z = self.scatter(&x);
        let final_energy = energy_f_l2(&z, &self.gradient)?;
        Ok((
            z,
            SolveReport {
                iterations,
                final_max_update: max_update,
                final_energy,
                converged: max_update < tol,
            },
        ))
    }

    #[inline]
    fn gather(&self, k: usize, x: &[f64]) -> f64 {
        self.neighbors[self.offsets[k]..self.offsets[k + 1]]
            .iter()
            .map(|&j| x[j])
            .sum()
    }

    fn jacobi_sweep(&self, x: &[f64], out: &mut [f64]) -> f64 {
        out.par_iter_mut()
            .enumerate()
            .map(|(k, slot)| {
                let deg = self.degree[k];
                if deg == 0 {
                    *slot = x[k];
                    return 0.0;
                }
                let plain = (self.gather(k, x) - self.rhs[k]) / deg as f64;
                let next = x[k] + JACOBI_DAMPING * (plain - x[k]);
                *slot = next;
                (next - x[k]).abs()
            })
            .reduce(|| 0.0, f64::max)
    }

    fn red_black_sweep(&self, x: &mut [f64], omega: f64) -> f64 {
        let n_red = self.n_red;
        let (red, black) = x.split_at_mut(n_red);
        let red_update = self.half_sweep(red, black, 0, omega, true);
        let black_update = self.half_sweep(black, red, n_red, omega, false);
        red_update.max(black_update)
    }

    /// Update the unknowns of one color, reading only the other color.
    fn half_sweep(
        &self,
        own: &mut [f64],
        other: &[f64],
        own_start: usize,
        omega: f64,
        own_is_red: bool,
    ) -> f64 {
        let other_start = if own_is_red { self.n_red } else { 0 };
        own.par_iter_mut()
            .enumerate()
            .map(|(local, slot)| {
                let k = own_start + local;
                let deg = self.degree[k];
                if deg == 0 {
                    return 0.0;
                }
                let sum: f64 = self.neighbors[self.offsets[k]..self.offsets[k + 1]]
                    .iter()
                    .map(|&j| other[j - other_start])
                    .sum();
                let target = (sum - self.rhs[k]) / deg as f64;
                let delta = omega * (target - *slot);
                *slot += delta;
                delta.abs()
            })
            .reduce(|| 0.0, f64::max)
    }

    fn recenter(&self, x: &mut [f64]) {
        let count = self.component_anchored.len();
        let mut sums = vec![0.0; count];
        let mut sizes = vec![0usize; count];
        for (k, &c) in self.component.iter().enumerate() {
            sums[c] += x[k];
            sizes[c] += 1;
        }
        for (k, &c) in self.component.iter().enumerate() {
            if !self.component_anchored[c] && sizes[c] > 0 {
                x[k] -= sums[c] / sizes[c] as f64;
            }
        }
    }

    fn scatter(&self, x: &[f64]) -> ScalarGrid {
        let mut z = self.fixed.clone();
        for (&(u, v), &value) in self.pixels.iter().zip(x) {
            z.set(u, v, value);
        }
        z
    }
}

/// Least-squares energy of `z` against `g`: the sum of squared residuals of
/// every horizontal and vertical edge inside the domain.
pub fn energy_f_l2(z: &ScalarGrid, g: &GradientField) -> Result<f64> {
    ensure_dims(g.dims(), z.dims())?;
    let mask = &g.mask;
    let mut energy = 0.0;
    for (u, v) in mask.inside_pixels() {
        if mask.is_inside(u + 1, v) {
            let r = z.get(u + 1, v) - z.get(u, v) - 0.5 * (g.p.get(u + 1, v) + g.p.get(u, v));
            energy += r * r;
        }
        if mask.is_inside(u, v + 1) {
            let r = z.get(u, v + 1) - z.get(u, v) - 0.5 * (g.q.get(u, v + 1) + g.q.get(u, v));
            energy += r * r;
        }
    }
    Ok(energy)
}

/// Assemble and solve in one call.
pub fn integrate_least_squares(g: &GradientField, cfg: &SolverConfig) -> Result<(ScalarGrid, SolveReport)> {
    assemble_system(g)?.solve(cfg)
}
