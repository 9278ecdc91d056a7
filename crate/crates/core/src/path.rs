//! Direct curvilinear integration of gradient fields.
//!
//! Every pixel receives the value of a predecessor plus the trapezoidal
//! increment across the edge joining them, i.e. `(p(a) + p(b)) / 2` along
//! `u` and `(q(a) + q(b)) / 2` along `v`. This is the same edge model as the
//! least-squares functional used by the iterative solver.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{GradientField, ScalarGrid, OUTSIDE};

/// Deterministic sweep orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepOrder {
    /// Along the origin's row first, then along each column.
    RowMajor,
    /// Along the origin's column first, then along each row.
    ColumnMajor,
}

#[derive(Debug, Clone, Copy)]
enum Step {
    Horizontal,
    Vertical,
}

/// Integrate `g` from `origin` (where the result is 0) over the origin's
/// connected component. Pixels of other components hold the outside marker.
pub fn integrate_path(g: &GradientField, origin: (usize, usize), order: SweepOrder) -> Result<ScalarGrid> {
    let prefer = match order {
        SweepOrder::RowMajor => Step::Vertical,
        SweepOrder::ColumnMajor => Step::Horizontal,
    };
    integrate_staircase(g, origin, |_| prefer)
}

/// Average of `n_paths` integrations: the two deterministic sweeps plus
/// `n_paths - 2` random monotone staircases drawn from `seed`.
pub fn integrate_multipath(
    g: &GradientField,
    origin: (usize, usize),
    n_paths: usize,
    seed: u64,
) -> Result<ScalarGrid> {
    if n_paths < 2 {
        return Err(Error::Usage(format!(
            "multipath integration needs at least 2 paths, got {n_paths}"
        )));
    }
    let runs: Vec<ScalarGrid> = (0..n_paths)
        .into_par_iter()
        .map(|k| match k {
            0 => integrate_path(g, origin, SweepOrder::RowMajor),
            1 => integrate_path(g, origin, SweepOrder::ColumnMajor),
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(k as u64);
                integrate_staircase(g, origin, |_| {
                    if rng.random_bool(0.5) {
                        Step::Horizontal
                    } else {
                        Step::Vertical
                    }
                })
            }
        })
        .collect::<Result<_>>()?;

    // Fixed-order reduction keeps the sum independent of scheduling.
    let mut sum = runs[0].clone();
    for run in &runs[1..] {
        for (acc, x) in sum.values_mut().iter_mut().zip(run.values()) {
            *acc += x;
        }
    }
    let scale = 1.0 / n_paths as f64;
    Ok(sum.map(|x| x * scale))
}

/// Monotone staircase integration: each pixel is reached from a neighbor one
/// step closer to the origin (in its quadrant), chosen by `choose` when both
/// candidates are available. Pixels that no staircase reaches inside the
/// domain are filled by breadth-first chaining from already integrated ones.
fn integrate_staircase(
    g: &GradientField,
    origin: (usize, usize),
    mut choose: impl FnMut((usize, usize)) -> Step,
) -> Result<ScalarGrid> {
    let mask = &g.mask;
    let (w, h) = mask.dims();
    let (u0, v0) = origin;
    if !mask.is_inside(u0, v0) {
        return Err(Error::Usage(format!(
            "integration origin ({u0}, {v0}) is outside the domain"
        )));
    }
    g.check_finite()?;
    let components = mask.components();
    let label = components.labels[v0 * w + u0];

    let mut order: Vec<(usize, usize)> = mask
        .inside_pixels()
        .filter(|&(u, v)| components.labels[v * w + u] == label)
        .collect();
    order.sort_by_key(|&(u, v)| u.abs_diff(u0) + v.abs_diff(v0));

    let mut z = ScalarGrid::filled(w, h, OUTSIDE);
    let mut done = vec![false; w * h];
    z.set(u0, v0, 0.0);
    done[v0 * w + u0] = true;

    for &(u, v) in order.iter().skip(1) {
        let horizontal = (u != u0)
            .then(|| if u > u0 { (u - 1, v) } else { (u + 1, v) })
            .filter(|&(a, b)| done[b * w + a]);
        let vertical = (v != v0)
            .then(|| if v > v0 { (u, v - 1) } else { (u, v + 1) })
            .filter(|&(a, b)| done[b * w + a]);
        let pred = match (horizontal, vertical) {
            (Some(hp), Some(vp)) => match choose((u, v)) {
                Step::Horizontal => hp,
                Step::Vertical => vp,
            },
            (Some(hp), None) => hp,
            (None, Some(vp)) => vp,
            (None, None) => continue,
        };
        let value = z.get(pred.0, pred.1) + increment(g, pred, (u, v));
        z.set(u, v, value);
        done[v * w + u] = true;
    }

    let mut queue: VecDeque<(usize, usize)> =
        order.iter().copied().filter(|&(u, v)| done[v * w + u]).collect();
    while let Some((u, v)) = queue.pop_front() {
        for next in mask.inside_neighbors(u, v) {
            let i = next.1 * w + next.0;
            if !done[i] {
                let value = z.get(u, v) + increment(g, (u, v), next);
                z.set(next.0, next.1, value);
                done[i] = true;
                queue.push_back(next);
            }
        }
    }
    Ok(z)
}

/// Trapezoidal increment `z(to) - z(from)` across an axis edge.
#[inline]
fn increment(g: &GradientField, from: (usize, usize), to: (usize, usize)) -> f64 {
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
