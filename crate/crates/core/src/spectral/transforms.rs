//! Two-dimensional discrete Fourier, sine and cosine transforms.
//!
//! Conventions, for a `m x n` grid `f(u, v)`:
//!
//! * `dft2`: `F(k,l) = sum f(u,v) exp(-2πj uk/m) exp(-2πj vl/n)`; the inverse
//!   carries the `1 / (mn)` factor.
//! * `sine2`: the grid holds the interior samples `u = 1..M-1`, `v = 1..N-1` of
//!   an `(M+1) x (N+1)` lattice (so `M = m + 1`), and
//!   `F(k,l) = sum f(u,v) sin(πku/M) sin(πlv/N)`; the inverse is
//!   `4 / (MN)` times the same sum over `k, l`.
//! * `cosine2`: half-sample nodes,
//!   `F(k,l) = sum f(u,v) cos(πk(2u+1)/(2m)) cos(πl(2v+1)/(2n))`; the inverse is
//!   `4 / (mn) sum c_k c_l F(k,l) cos(..) cos(..)` with `c_0 = 1/2`, `c_k = 1`
//!   otherwise.
//!
//! Rows and columns are transformed in parallel with fast algorithms.

use rayon::prelude::*;
use rustdct::DctPlanner;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::grid::ScalarGrid;

/// Dense complex grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGrid {
    pub width: usize,
    pub height: usize,
    pub values: Vec<Complex64>,
}

impl ComplexGrid {
    pub fn from_real(grid: &ScalarGrid) -> Self {
        Self {
            width: grid.width(),
            height: grid.height(),
            values: grid.values().iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    #[inline]
    pub fn get(&self, k: usize, l: usize) -> Complex64 {
        self.values[l * self.width + k]
    }

    /// Real part, plus the largest absolute imaginary part.
    pub fn split_real(&self) -> (ScalarGrid, f64) {
        let residue = self.values.iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
        let real = ScalarGrid::from_vec(
            self.width,
            self.height,
            self.values.iter().map(|c| c.re).collect(),
        )
        .expect("dimensions preserved");
        (real, residue)
    }
}

fn transpose<T: Copy + Send + Sync>(data: &[T], width: usize, height: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(data.len());
    for u in 0..width {
        out.extend((0..height).map(|v| data[v * width + u]));
    }
    out
}

/// Apply `row_op` to every row and then to every column of a row-major
/// buffer. `row_op` receives the line and the line length.
fn separable<T, R, C>(data: &mut Vec<T>, width: usize, height: usize, row_op: R, col_op: C)
where
    T: Copy + Send + Sync,
    R: Fn(&mut [T]) + Sync,
    C: Fn(&mut [T]) + Sync,
{
    data.par_chunks_mut(width).for_each(&row_op);
    let mut cols = transpose(data, width, height);
    cols.par_chunks_mut(height).for_each(&col_op);
    *data = transpose(&cols, height, width);
}

fn fft_lines(data: &mut Vec<Complex64>, width: usize, height: usize, inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let (row_fft, col_fft) = if inverse {
        (planner.plan_fft_inverse(width), planner.plan_fft_inverse(height))
    } else {
        (planner.plan_fft_forward(width), planner.plan_fft_forward(height))
    };
    separable(
        data,
        width,
        height,
        |row| row_fft.process(row),
        |col| col_fft.process(col),
    );
}

/// Forward 2D discrete Fourier transform (unnormalised).
pub fn dft2(grid: &ScalarGrid) -> ComplexGrid {
    let mut out = ComplexGrid::from_real(grid);
    fft_lines(&mut out.values, out.width, out.height, false);
    out
}

/// Inverse 2D discrete Fourier transform, including the `1 / (mn)` factor.
pub fn idft2(spectrum: &ComplexGrid) -> ComplexGrid {
    let mut out = spectrum.clone();
    fft_lines(&mut out.values, out.width, out.height, true);
    let scale = 1.0 / (out.width * out.height) as f64;
    for c in &mut out.values {
        *c *= scale;
    }
    out
}

/// Forward 2D sine transform of the interior samples of a lattice.
pub fn sine2(grid: &ScalarGrid) -> ScalarGrid {
    let (w, h) = grid.dims();
    let mut planner = DctPlanner::<f64>::new();
    let (row, col) = (planner.plan_dst1(w), planner.plan_dst1(h));
    let mut data = grid.values().to_vec();
    separable(&mut data, w, h, |x| row.process_dst1(x), |x| col.process_dst1(x));
    ScalarGrid::from_vec(w, h, data).expect("dimensions preserved")
}

/// Inverse of [`sine2`].
pub fn inverse_sine2(spectrum: &ScalarGrid) -> ScalarGrid {
    let (w, h) = spectrum.dims();
    let scale = 4.0 / ((w + 1) * (h + 1)) as f64;
    sine2(spectrum).map(|x| x * scale)
}

/// Forward 2D cosine transform at half-sample nodes.
pub fn cosine2(grid: &ScalarGrid) -> ScalarGrid {
    let (w, h) = grid.dims();
    let mut planner = DctPlanner::<f64>::new();
    let (row, col) = (planner.plan_dct2(w), planner.plan_dct2(h));
    let mut data = grid.values().to_vec();
    separable(&mut data, w, h, |x| row.process_dct2(x), |x| col.process_dct2(x));
    ScalarGrid::from_vec(w, h, data).expect("dimensions preserved")
}

/// Inverse of [`cosine2`].
pub fn inverse_cosine2(spectrum: &ScalarGrid) -> ScalarGrid {
    let (w, h) = spectrum.dims();
    let mut planner = DctPlanner::<f64>::new();
    let (row, col) = (planner.plan_dct3(w), planner.plan_dct3(h));
    let mut data = spectrum.values().to_vec();
    separable(&mut data, w, h, |x| row.process_dct3(x), |x| col.process_dct3(x));
    let scale = 4.0 / (w * h) as f64;
    ScalarGrid::from_vec(w, h, data)
        .expect("dimensions preserved")
        .map(|x| x * scale)
}
