//! Non-iterative Poisson solvers on rectangular domains.
//!
//! * [`solve_fc_continuous`] projects the gradient onto the Fourier basis using
//!   the continuous derivative symbols (periodic by construction).
//! * [`solve_scs_periodic`], [`solve_scs_dirichlet`] and [`solve_scs_neumann`]
//!   solve the five-point discrete Poisson equation exactly, diagonalised by
//!   the discrete Fourier, sine and cosine transforms respectively.
//!
//! The cosine basis is sampled at half-sample nodes `cos(πk(2u+1)/(2m))`,
//! which is exactly orthogonal and diagonalises the reflective five-point
//! Laplacian with eigenvalues `-4 [sin²(πk/2m) + sin²(πl/2n)]`.

pub mod transforms;

use std::f64::consts::{PI, SQRT_2};

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{ensure_dims, GradientField, ScalarGrid};
pub use transforms::{
    cosine2, dft2, idft2, inverse_cosine2, inverse_sine2, sine2, ComplexGrid,
};

/// Boundary condition of a rectangular-domain solve.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundarySpec {
    Periodic,
    /// Depth values on the outer ring of the lattice; other pixels ignored.
    Dirichlet(ScalarGrid),
    /// Outward normal derivative `∇z · η` on the border pixels; other pixels
    /// ignored. Corner pixels use the diagonal normal.
    Neumann(ScalarGrid),
    /// Natural boundary condition `(∇z - g) · η = 0`.
    NeumannNatural,
}

impl BoundarySpec {
    pub fn name(&self) -> &'static str {
        match self {
            BoundarySpec::Periodic => "periodic",
            BoundarySpec::Dirichlet(_) => "dirichlet",
            BoundarySpec::Neumann(_) => "neumann",
            BoundarySpec::NeumannNatural => "natural",
        }
    }
}

/// Which continuous-Fourier formula [`solve_fc_continuous`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FcConvention {
    /// Pulsations `ω = 2π k / m`.
    Pulsation,
    /// Frequencies `ν = k / m`, with the `2π` factor in the denominator.
    Frequency,
    /// Frequencies with the `2π` factor omitted. This reproduces a known
    /// implementation bug and scales the result by `2π`; kept for regression
    /// testing only.
    FrequencyMissing2Pi,
}

fn require_rectangle(g: &GradientField, method: &str) -> Result<()> {
    if g.mask.is_full() {
        g.check_finite()
    } else {
        Err(Error::UnsupportedDomain(format!(
            "{method} requires a rectangular (full) domain"
        )))
    }
}

/// Signed frequency index: `k` for `k <= m/2`, else `k - m`.
#[inline]
fn signed_index(k: usize, m: usize) -> f64 {
    if 2 * k <= m {
        k as f64
    } else {
        k as f64 - m as f64
    }
}

fn remove_mean(z: &mut ScalarGrid) {
    let mean = z.values().iter().sum::<f64>() / z.len() as f64;
    for x in z.values_mut() {
        *x -= mean;
    }
}

/// Frankot-Chellappa integration: Fourier projection with the continuous
/// derivative symbols `jω`. The mean (zero frequency) is set to 0.
pub fn solve_fc_continuous(g: &GradientField, convention: FcConvention) -> Result<ScalarGrid> {
    Ok(fc_with_residue(g, convention)?.0)
}

fn fc_with_residue(g: &GradientField, convention: FcConvention) -> Result<(ScalarGrid, f64)> {
    require_rectangle(g, "Frankot-Chellappa integration")?;
    let (m, n) = g.dims();
    let p_hat = dft2(&g.p);
    let q_hat = dft2(&g.q);
    let j = Complex64::new(0.0, 1.0);
    let mut z_hat = ComplexGrid {
        width: m,
        height: n,
        values: vec![Complex64::new(0.0, 0.0); m * n],
    };
    for l in 0..n {
        for k in 0..m {
            if (k, l) == (0, 0) {
                continue;
            }
            let (su, sv) = (signed_index(k, m), signed_index(l, n));
            // At the Nyquist index the first-derivative symbol is not
            // Hermitian; drop it from the numerator to keep z real.
            let nu_num = if 2 * k == m { 0.0 } else { su / m as f64 };
            let nv_num = if 2 * l == n { 0.0 } else { sv / n as f64 };
            let (nu, nv) = (su / m as f64, sv / n as f64);
            let i = l * m + k;
            let numerator_freq = nu_num * p_hat.values[i] + nv_num * q_hat.values[i];
            z_hat.values[i] = match convention {
                FcConvention::Pulsation => {
                    let (wu, wv) = (2.0 * PI * nu, 2.0 * PI * nv);
                    (2.0 * PI * numerator_freq) / (j * (wu * wu + wv * wv))
                }
                FcConvention::Frequency => numerator_freq / (2.0 * PI * j * (nu * nu + nv * nv)),
                FcConvention::FrequencyMissing2Pi => numerator_freq / (j * (nu * nu + nv * nv)),
            };
        }
    }
    let (mut z, residue) = idft2(&z_hat).split_real();
    remove_mean(&mut z);
    Ok((z, residue))
}

/// Discrete Poisson solve with periodic boundaries.
pub fn solve_scs_periodic(g: &GradientField) -> Result<ScalarGrid> {
    Ok(periodic_with_residue(g)?.0)
}

fn periodic_with_residue(g: &GradientField) -> Result<(ScalarGrid, f64)> {
    require_rectangle(g, "periodic Poisson solve")?;
    let (m, n) = g.dims();
    let p_hat = dft2(&g.p);
    let q_hat = dft2(&g.q);
    let j = Complex64::new(0.0, 1.0);
    let mut z_hat = ComplexGrid {
        width: m,
        height: n,
        values: vec![Complex64::new(0.0, 0.0); m * n],
    };
    for l in 0..n {
        for k in 0..m {
            if (k, l) == (0, 0) {
                continue;
            }
            let (ak, al) = (PI * k as f64 / m as f64, PI * l as f64 / n as f64);
            let denominator = 4.0 * (ak.sin().powi(2) + al.sin().powi(2));
            let i = l * m + k;
            let numerator = (2.0 * ak).sin() * p_hat.values[i] + (2.0 * al).sin() * q_hat.values[i];
            z_hat.values[i] = numerator / (j * denominator);
        }
    }
    let (mut z, residue) = idft2(&z_hat).split_real();
    remove_mean(&mut z);
    Ok((z, residue))
}

/// Right-hand side of the Dirichlet problem on the `(W-2) x (H-2)` interior
/// unknowns of a `W x H` lattice: central divergence, minus the boundary
/// value of every neighbor lying on the outer ring.
pub fn dirichlet_rhs(g: &GradientField, boundary: &ScalarGrid) -> Result<ScalarGrid> {
    ensure_dims(g.dims(), boundary.dims())?;
    let (w, h) = g.dims();
    if w < 3 || h < 3 {
        return Err(Error::UnsupportedDomain(format!(
            "Dirichlet solve needs a lattice of at least 3x3, got {w}x{h}"
        )));
    }
    for v in 0..h {
        for u in 0..w {
            let on_ring = u == 0 || v == 0 || u == w - 1 || v == h - 1;
            if on_ring && !boundary.get(u, v).is_finite() {
                return Err(Error::Config(format!(
                    "Dirichlet boundary value missing at ring pixel ({u}, {v})"
                )));
            }
        }
    }
    let mut rhs = ScalarGrid::zeros(w - 2, h - 2);
    for v in 1..h - 1 {
        for u in 1..w - 1 {
            let mut value = 0.5 * (g.p.get(u + 1, v) - g.p.get(u - 1, v))
                + 0.5 * (g.q.get(u, v + 1) - g.q.get(u, v - 1));
            if u == 1 {
                value -= boundary.get(0, v);
            }
            if u == w - 2 {
                value -= boundary.get(w - 1, v);
            }
            if v == 1 {
                value -= boundary.get(u, 0);
            }
            if v == h - 2 {
                value -= boundary.get(u, h - 1);
            }
            rhs.set(u - 1, v - 1, value);
        }
    }
    Ok(rhs)
}

/// Solve the homogeneous-Dirichlet five-point Poisson problem whose interior
/// right-hand side is `rhs` (the ring is implicitly zero).
pub fn solve_dirichlet_rhs(rhs: &ScalarGrid) -> ScalarGrid {
    let (w, h) = rhs.dims();
    let (m, n) = ((w + 1) as f64, (h + 1) as f64);
    let mut spectrum = sine2(rhs);
    for l in 0..h {
        for k in 0..w {
            let eig = 4.0
                * ((PI * (k + 1) as f64 / (2.0 * m)).sin().powi(2)
                    + (PI * (l + 1) as f64 / (2.0 * n)).sin().powi(2));
            let value = spectrum.get(k, l);
            spectrum.set(k, l, -value / eig);
        }
    }
    inverse_sine2(&spectrum)
}

/// Discrete Poisson solve with Dirichlet data on the outer ring of the
/// lattice. The ring of the output holds the boundary values.
pub fn solve_scs_dirichlet(g: &GradientField, boundary: &ScalarGrid) -> Result<ScalarGrid> {
    require_rectangle(g, "Dirichlet Poisson solve")?;
    let rhs = dirichlet_rhs(g, boundary)?;
    let interior = solve_dirichlet_rhs(&rhs);
    let (w, h) = g.dims();
    let mut z = boundary.clone();
    for v in 1..h - 1 {
        for u in 1..w - 1 {
            z.set(u, v, interior.get(u - 1, v - 1));
        }
    }
    Ok(z)
}

/// Neumann data for [`solve_scs_neumann`].
#[derive(Debug, Clone, Copy)]
pub enum NeumannData<'a> {
    /// `b = g · η`, the natural boundary condition.
    Natural,
    Given(&'a ScalarGrid),
}

/// Outward unit normal of a border pixel, `None` inside.
fn outward_normal(u: usize, v: usize, w: usize, h: usize) -> Option<(f64, f64)> {
    let su = if u == 0 {
        -1.0
    } else if u == w - 1 {
        1.0
    } else {
        0.0
    };
    let sv = if v == 0 {
        -1.0
    } else if v == h - 1 {
        1.0
    } else {
        0.0
    };
    match (su != 0.0, sv != 0.0) {
        (false, false) => None,
        (true, true) => Some((su / SQRT_2, sv / SQRT_2)),
        _ => Some((su, sv)),
    }
}

/// Right-hand side of the Neumann problem on a `W x H` grid of unknowns.
///
/// Interior pixels get the central divergence. On border pixels, missing
/// samples of `p`/`q` beyond the edge are replaced by the edge sample, and
/// the Neumann datum is subtracted (times `√2` at corners).
pub fn neumann_rhs(g: &GradientField, data: NeumannData<'_>) -> Result<ScalarGrid> {
    let (w, h) = g.dims();
    if w < 2 || h < 2 {
        return Err(Error::UnsupportedDomain(format!(
            "Neumann solve needs at least 2x2 pixels, got {w}x{h}"
        )));
    }
    if let NeumannData::Given(b) = data {
        ensure_dims(g.dims(), b.dims())?;
    }
    let mut rhs = ScalarGrid::zeros(w, h);
    for v in 0..h {
        for u in 0..w {
            let (um, up) = (u.saturating_sub(1), (u + 1).min(w - 1));
            let (vm, vp) = (v.saturating_sub(1), (v + 1).min(h - 1));
            let mut value = 0.5 * (g.p.get(up, v) - g.p.get(um, v))
                + 0.5 * (g.q.get(u, vp) - g.q.get(u, vm));
            if let Some((eu, ev)) = outward_normal(u, v, w, h) {
                let b = match data {
                    NeumannData::Natural => g.p.get(u, v) * eu + g.q.get(u, v) * ev,
                    NeumannData::Given(grid) => {
                        let b = grid.get(u, v);
                        if !b.is_finite() {
                            return Err(Error::Config(format!(
                                "Neumann boundary value missing at border pixel ({u}, {v})"
                            )));
                        }
                        b
                    }
                };
                let corner = eu != 0.0 && ev != 0.0;
                value -= if corner { SQRT_2 * b } else { b };
            }
            rhs.set(u, v, value);
        }
    }
    Ok(rhs)
}

/// Solve the reflective five-point Poisson problem with right-hand side
/// `rhs`; the constant mode is set to zero, so the right-hand side is
/// effectively projected onto zero mean.
pub fn solve_neumann_rhs(rhs: &ScalarGrid) -> ScalarGrid {
    let (w, h) = rhs.dims();
    let mut spectrum = cosine2(rhs);
    for l in 0..h {
        for k in 0..w {
            if (k, l) == (0, 0) {
                spectrum.set(0, 0, 0.0);
                continue;
            }
            let eig = 4.0
                * ((PI * k as f64 / (2.0 * w as f64)).sin().powi(2)
                    + (PI * l as f64 / (2.0 * h as f64)).sin().powi(2));
            let value = spectrum.get(k, l);
            spectrum.set(k, l, -value / eig);
        }
    }
    let mut z = inverse_cosine2(&spectrum);
    remove_mean(&mut z);
    z
}

/// Discrete Poisson solve with a Neumann boundary condition. The output has
/// zero mean.
pub fn solve_scs_neumann(g: &GradientField, data: NeumannData<'_>) -> Result<ScalarGrid> {
    require_rectangle(g, "Neumann Poisson solve")?;
    let rhs = neumann_rhs(g, data)?;
    Ok(solve_neumann_rhs(&rhs))
}

/// Dispatch on the boundary condition.
pub fn solve_rectangular(g: &GradientField, bc: &BoundarySpec) -> Result<ScalarGrid> {
    match bc {
        BoundarySpec::Periodic => solve_scs_periodic(g),
        BoundarySpec::Dirichlet(b) => solve_scs_dirichlet(g, b),
        BoundarySpec::Neumann(b) => solve_scs_neumann(g, NeumannData::Given(b)),
        BoundarySpec::NeumannNatural => solve_scs_neumann(g, NeumannData::Natural),
    }
}

/// Five-point Laplacian with periodic wrap-around.
pub fn wrapped_laplacian(z: &ScalarGrid) -> ScalarGrid {
    let (w, h) = z.dims();
    ScalarGrid::from_fn(w, h, |u, v| {
        z.get((u + 1) % w, v) + z.get((u + w - 1) % w, v) + z.get(u, (v + 1) % h)
            + z.get(u, (v + h - 1) % h)
            - 4.0 * z.get(u, v)
    })
}

/// Central divergence with periodic wrap-around.
pub fn wrapped_divergence(g: &GradientField) -> ScalarGrid {
    let (w, h) = g.dims();
    ScalarGrid::from_fn(w, h, |u, v| {
        0.5 * (g.p.get((u + 1) % w, v) - g.p.get((u + w - 1) % w, v))
            + 0.5 * (g.q.get(u, (v + 1) % h) - g.q.get(u, (v + h - 1) % h))
    })
}

/// Five-point Laplacian with reflected (mirror) ghost samples.
pub fn reflective_laplacian(z: &ScalarGrid) -> ScalarGrid {
    let (w, h) = z.dims();
    ScalarGrid::from_fn(w, h, |u, v| {
        let (um, up) = (u.saturating_sub(1), (u + 1).min(w - 1));
        let (vm, vp) = (v.saturating_sub(1), (v + 1).min(h - 1));
        z.get(up, v) + z.get(um, v) + z.get(u, vp) + z.get(u, vm) - 4.0 * z.get(u, v)
    })
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Maximum residual of the discrete system the rectangular solver for `bc`
/// assembles, evaluated at `z`.
pub fn stencil_residual(z: &ScalarGrid, g: &GradientField, bc: &BoundarySpec) -> Result<f64> {
    ensure_dims(g.dims(), z.dims())?;
    let (w, h) = g.dims();
    match bc {
        BoundarySpec::Periodic => {
            let rhs = wrapped_divergence(g);
            let mean = rhs.values().iter().sum::<f64>() / rhs.len() as f64;
            let lap = wrapped_laplacian(z);
            let projected: Vec<f64> = rhs.values().iter().map(|x| x - mean).collect();
            Ok(max_abs_diff(lap.values(), &projected))
        }
        BoundarySpec::Dirichlet(boundary) => {
            let rhs = dirichlet_rhs(g, boundary)?;
            let mut worst = 0.0f64;
            for v in 1..h - 1 {
                for u in 1..w - 1 {
                    let at = |a: usize, b: usize| {
                        let ring = a == 0 || b == 0 || a == w - 1 || b == h - 1;
                        if ring {
                            0.0
                        } else {
                            z.get(a, b)
                        }
                    };
                    let lap = at(u + 1, v) + at(u - 1, v) + at(u, v + 1) + at(u, v - 1)
                        - 4.0 * z.get(u, v);
                    worst = worst.max((lap - rhs.get(u - 1, v - 1)).abs());
                }
            }
            for v in 0..h {
                for u in 0..w {
                    if u == 0 || v == 0 || u == w - 1 || v == h - 1 {
                        worst = worst.max((z.get(u, v) - boundary.get(u, v)).abs());
                    }
                }
            }
            Ok(worst)
        }
        BoundarySpec::Neumann(_) | BoundarySpec::NeumannNatural => {
            let data = match bc {
                BoundarySpec::Neumann(b) => NeumannData::Given(b),
                _ => NeumannData::Natural,
            };
            let rhs = neumann_rhs(g, data)?;
            let mean = rhs.values().iter().sum::<f64>() / rhs.len() as f64;
            let projected: Vec<f64> = rhs.values().iter().map(|x| x - mean).collect();
            Ok(max_abs_diff(reflective_laplacian(z).values(), &projected))
        }
    }
}
