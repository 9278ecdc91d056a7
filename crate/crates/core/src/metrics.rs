//! Evaluation metrics: integrability energy, offset-aligned RMSE and the
//! residual of the discrete systems assembled by the solvers.

use crate::error::{Error, Result};
use crate::grid::{ensure_dims, DomainMask, GradientField, ScalarGrid};
use crate::iterative::assemble_system;
use crate::spectral::{self, BoundarySpec};

/// Discrete integrability (curl) energy of `g`.
///
/// Sums `[(p(u,v+1) - p(u,v)) - (q(u+1,v) - q(u,v))]^2` over every pixel
/// whose `+u`, `+v` and diagonal `+u+v` neighbors are inside, so that all four
/// samples involved belong to the domain.
pub fn e_int(g: &GradientField) -> f64 {
    let mask = &g.mask;
    let mut energy = 0.0;
    for (u, v) in mask.inside_pixels() {
        if mask.is_inside(u + 1, v) && mask.is_inside(u, v + 1) && mask.is_inside(u + 1, v + 1) {
            let curl = (g.p.get(u, v + 1) - g.p.get(u, v)) - (g.q.get(u + 1, v) - g.q.get(u, v));
            energy += curl * curl;
        }
    }
    energy
}

/// RMSE after the optimal additive alignment of `z` onto `z_gt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignedError {
    pub rmse: f64,
    /// Offset added to `z` (least-squares optimum).
    pub offset: f64,
}

/// RMSE between `z + offset` and `z_gt` over `mask`, with `offset` the mean of
/// `z_gt - z`, which is the exact least-squares shift.
pub fn rmse_offset_aligned(
    z: &ScalarGrid,
    z_gt: &ScalarGrid,
    mask: &DomainMask,
) -> Result<AlignedError> {
    ensure_dims(mask.dims(), z.dims())?;
    ensure_dims(mask.dims(), z_gt.dims())?;
    let diffs: Vec<f64> = mask
        .inside_pixels()
        .map(|(u, v)| z_gt.get(u, v) - z.get(u, v))
        .collect();
    if diffs.is_empty() {
        return Err(Error::Usage("rmse over an empty mask".into()));
    }
    let n = diffs.len() as f64;
    let offset = diffs.iter().sum::<f64>() / n;
    let mse = diffs.iter().map(|d| (d - offset).powi(2)).sum::<f64>() / n;
    Ok(AlignedError {
        rmse: mse.sqrt(),
        offset,
    })
}

/// Depth-domain RMSE after the optimal positive scaling of `z` onto `z_gt`,
/// where the scale is `exp(mean(ln z_gt - ln z))`. Both grids must be
/// positive on `mask`. Returns `(rmse, scale)`.
pub fn rmse_scale_aligned(
    z: &ScalarGrid,
    z_gt: &ScalarGrid,
    mask: &DomainMask,
) -> Result<(f64, f64)> {
    ensure_dims(mask.dims(), z.dims())?;
    ensure_dims(mask.dims(), z_gt.dims())?;
    let mut log_ratio = 0.0;
    let mut count = 0usize;
    for (u, v) in mask.inside_pixels() {
        let (a, b) = (z.get(u, v), z_gt.get(u, v));
        if a <= 0.0 || b <= 0.0 {
            return Err(Error::Data(format!(
                "non-positive depth at pixel ({u}, {v})"
            )));
        }
        log_ratio += b.ln() - a.ln();
        count += 1;
    }
    if count == 0 {
        return Err(Error::Usage("rmse over an empty mask".into()));
    }
    let scale = (log_ratio / count as f64).exp();
    let mse = mask
        .inside_pixels()
        .map(|(u, v)| (scale * z.get(u, v) - z_gt.get(u, v)).powi(2))
        .sum::<f64>()
        / count as f64;
    Ok((mse.sqrt(), scale))
}

/// Which discrete system a candidate solution is checked against.
#[derive(Debug, Clone)]
pub enum ResidualSystem {
    /// Least-squares normal equations on an arbitrary mask (natural boundary).
    Natural,
    /// One of the rectangular-domain boundary conditions.
    Rectangular(BoundarySpec),
}

/// Maximum absolute residual of the per-pixel equations the named solver
/// assembles, evaluated at `z`.
///
/// Singular systems (natural, periodic, Neumann) are compared against their
/// right-hand side projected onto the range of the operator, which is the
/// system the solvers actually satisfy.
pub fn stencil_residual(
    z: &ScalarGrid,
    g: &GradientField,
    system: &ResidualSystem,
) -> Result<f64> {
    ensure_dims(g.dims(), z.dims())?;
    match system {
        ResidualSystem::Natural => Ok(assemble_system(g)?.residual(z)),
        ResidualSystem::Rectangular(bc) => spectral::stencil_residual(z, g, bc),
    }
}
