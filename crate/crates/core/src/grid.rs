//! Raster containers, reconstruction domains and the discrete differential
//! operators shared by every solver.
//!
//! Pixels are addressed as `(u, v)` with `u` the column (`0..width`) and `v`
//! the row (`0..height`); storage is row-major. The grid spacing is 1.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Axis-neighbor offsets in the fixed order `+u, -u, +v, -v`.
pub const NEIGHBOR_OFFSETS: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Marker stored in pixels that lie outside the reconstruction domain.
pub const OUTSIDE: f64 = f64::NAN;

/// Dense 2D grid of reals.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl ScalarGrid {
    /// Grid filled with `value`.
    ///
    /// Panics if either dimension is zero.
    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!(width > 0 && height > 0, "grid dimensions must be positive");
        Self {
            width,
            height,
            values: vec![value; width * height],
        }
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0.0)
    }

    pub fn from_vec(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Usage(format!(
                "grid dimensions must be positive, got {width}x{height}"
            )));
        }
        if values.len() != width * height {
            return Err(Error::Usage(format!(
                "{width}x{height} grid needs {} values, got {}",
                width * height,
                values.len()
            )));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    /// Grid whose pixel `(u, v)` holds `f(u, v)`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut grid = Self::zeros(width, height);
        for v in 0..height {
            for u in 0..width {
                grid.values[v * width + u] = f(u, v);
            }
        }
        grid
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn index(&self, u: usize, v: usize) -> usize {
        debug_assert!(u < self.width && v < self.height);
        v * self.width + u
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.values[self.index(u, v)]
    }

    #[inline]
    pub fn set(&mut self, u: usize, v: usize, value: f64) {
        let i = self.index(u, v);
        self.values[i] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            width: self.width,
            height: self.height,
            values: self.values.iter().map(|&x| f(x)).collect(),
        }
    }

    /// Pixel-wise combination of two grids of equal size.
    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        ensure_dims(self.dims(), other.dims())?;
        Ok(Self {
            width: self.width,
            height: self.height,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Copy with every pixel outside `mask` set to the outside marker.
    pub fn masked(&self, mask: &DomainMask) -> Result<Self> {
        ensure_dims(self.dims(), mask.dims())?;
        let mut out = self.clone();
        for (value, &inside) in out.values.iter_mut().zip(mask.inside_flags()) {
            if !inside {
                *value = OUTSIDE;
            }
        }
        Ok(out)
    }

    /// Maximum absolute value over the inside pixels of `mask`.
    pub fn max_abs_on(&self, mask: &DomainMask) -> f64 {
        self.values
            .iter()
            .zip(mask.inside_flags())
            .filter(|(_, &inside)| inside)
            .fold(0.0, |acc, (&x, _)| acc.max(x.abs()))
    }

    /// Mean over the inside pixels of `mask`.
    pub fn mean_on(&self, mask: &DomainMask) -> f64 {
        let (sum, count) = self
            .values
            .iter()
            .zip(mask.inside_flags())
            .filter(|(_, &inside)| inside)
            .fold((0.0, 0usize), |(s, c), (&x, _)| (s + x, c + 1));
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    }

    /// Minimum and maximum over the inside pixels of `mask`.
    pub fn range_on(&self, mask: &DomainMask) -> (f64, f64) {
        self.values
            .iter()
            .zip(mask.inside_flags())
            .filter(|(_, &inside)| inside)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (&x, _)| {
                (lo.min(x), hi.max(x))
            })
    }
}

pub(crate) fn ensure_dims(expected: (usize, usize), got: (usize, usize)) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::dims(expected, got))
    }
}

/// Reconstruction domain: per-pixel inside/outside flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainMask {
    width: usize,
    height: usize,
    inside: Vec<bool>,
}

/// Classification of a pixel with respect to a [`DomainMask`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PixelClass {
    Outside,
    /// Inside, with all four axis neighbors inside.
    Interior,
    /// Inside, with at least one axis neighbor missing.
    Boundary,
}

/// Result of [`classify_pixel`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelInfo {
    pub class: PixelClass,
    /// Inside axis neighbors, in `+u, -u, +v, -v` order.
    pub neighbors: Vec<(usize, usize)>,
}

impl DomainMask {
    /// Every pixel inside.
    pub fn full(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "mask dimensions must be positive");
        Self {
            width,
            height,
            inside: vec![true; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, inside: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 || inside.len() != width * height {
            return Err(Error::Usage(format!(
                "{width}x{height} mask needs {} flags, got {}",
                width * height,
                inside.len()
            )));
        }
        if !inside.iter().any(|&b| b) {
            return Err(Error::Data(
                "mask must contain at least one inside pixel".into(),
            ));
        }
        Ok(Self {
            width,
            height,
            inside,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self> {
        let mut inside = Vec::with_capacity(width * height);
        for v in 0..height {
            for u in 0..width {
                inside.push(f(u, v));
            }
        }
        Self::from_vec(width, height, inside)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn inside_flags(&self) -> &[bool] {
        &self.inside
    }

    #[inline]
    pub fn is_inside(&self, u: usize, v: usize) -> bool {
        u < self.width && v < self.height && self.inside[v * self.width + u]
    }

    /// Signed-coordinate lookup; anything off the raster is outside.
    #[inline]
    pub fn is_inside_at(&self, u: isize, v: isize) -> bool {
        u >= 0 && v >= 0 && self.is_inside(u as usize, v as usize)
    }

    pub fn count_inside(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    pub fn is_full(&self) -> bool {
        self.inside.iter().all(|&b| b)
    }

    /// Iterator over inside pixels in row-major order.
    pub fn inside_pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.inside
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i % w, i / w))
    }

    /// Inside axis neighbors of `(u, v)` in `+u, -u, +v, -v` order.
    pub fn inside_neighbors(&self, u: usize, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        NEIGHBOR_OFFSETS.iter().filter_map(move |&(du, dv)| {
            let nu = u as isize + du;
            let nv = v as isize + dv;
            self.is_inside_at(nu, nv)
                .then_some((nu as usize, nv as usize))
        })
    }

    /// Copy of the mask with the pixels flagged in `removed` taken out.
    pub fn without(&self, removed: &[bool]) -> Result<Self> {
        if removed.len() != self.inside.len() {
            return Err(Error::Usage("removal flags do not match mask size".into()));
        }
        let inside = self
            .inside
            .iter()
            .zip(removed)
            .map(|(&a, &r)| a && !r)
            .collect();
        Self::from_vec(self.width, self.height, inside)
    }

    /// Four-connected components of the inside set.
    pub fn components(&self) -> Components {
        let mut labels = vec![usize::MAX; self.inside.len()];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.inside.len() {
            if !self.inside[start] || labels[start] != usize::MAX {
                continue;
            }
            labels[start] = count;
            queue.push_back(start);
            while let Some(i) = queue.pop_front() {
                let (u, v) = (i % self.width, i / self.width);
                for (nu, nv) in self.inside_neighbors(u, v) {
                    let j = nv * self.width + nu;
                    if labels[j] == usize::MAX {
                        labels[j] = count;
                        queue.push_back(j);
                    }
                }
            }
            count += 1;
        }
        Components { labels, count }
    }
}

/// Connected-component labelling of a mask.
#[derive(Debug, Clone)]
pub struct Components {
    /// Component id per pixel, `usize::MAX` for outside pixels.
    pub labels: Vec<usize>,
    pub count: usize,
}

impl Components {
    pub fn label(&self, index: usize) -> Option<usize> {
        let l = self.labels[index];
        (l != usize::MAX).then_some(l)
    }

    /// Subtract each component's mean from `grid`, in place.
    pub fn remove_means(&self, grid: &mut ScalarGrid) {
        let mut sums = vec![0.0; self.count];
        let mut counts = vec![0usize; self.count];
        for (x, &l) in grid.values().iter().zip(&self.labels) {
            if l != usize::MAX {
                sums[l] += x;
                counts[l] += 1;
            }
        }
        let means: Vec<f64> = sums
            .iter()
            .zip(&counts)
            .map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
            .collect();
        for (x, &l) in grid.values_mut().iter_mut().zip(&self.labels) {
            if l != usize::MAX {
                *x -= means[l];
            }
        }
    }
}

/// Gradient field `g = [p, q]` over a reconstruction domain.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub p: ScalarGrid,
    pub q: ScalarGrid,
    pub mask: DomainMask,
}

impl GradientField {
    pub fn new(p: ScalarGrid, q: ScalarGrid, mask: DomainMask) -> Result<Self> {
        ensure_dims(mask.dims(), p.dims())?;
        ensure_dims(mask.dims(), q.dims())?;
        Ok(Self { p, q, mask })
    }

    /// Field on the full raster.
    pub fn full(p: ScalarGrid, q: ScalarGrid) -> Result<Self> {
        let mask = DomainMask::full(p.width(), p.height());
        Self::new(p, q, mask)
    }

    pub fn dims(&self) -> (usize, usize) {
        self.mask.dims()
    }

    pub fn width(&self) -> usize {
        self.mask.width()
    }

    pub fn height(&self) -> usize {
        self.mask.height()
    }

    /// Data error naming the first inside pixel whose `p` or `q` is not finite.
    pub fn check_finite(&self) -> Result<()> {
        for (u, v) in self.mask.inside_pixels() {
            if !self.p.get(u, v).is_finite() || !self.q.get(u, v).is_finite() {
                return Err(Error::Data(format!(
                    "gradient is not finite at inside pixel ({u}, {v})"
                )));
            }
        }
        Ok(())
    }

    /// Same field restricted to a smaller domain.
    pub fn with_mask(&self, mask: DomainMask) -> Result<Self> {
        Self::new(self.p.clone(), self.q.clone(), mask)
    }

    /// Field scaled by `factor` (both components).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            p: self.p.map(|x| x * factor),
            q: self.q.map(|x| x * factor),
            mask: self.mask.clone(),
        }
    }
}

/// Classify `(u, v)` as outside, interior or boundary and list its inside
/// axis neighbors.
pub fn classify_pixel(mask: &DomainMask, u: usize, v: usize) -> Result<PixelInfo> {
    if u >= mask.width() || v >= mask.height() {
        return Err(Error::Usage(format!(
            "pixel ({u}, {v}) outside {}x{} raster",
            mask.width(),
            mask.height()
        )));
    }
    let neighbors: Vec<_> = mask.inside_neighbors(u, v).collect();
    let class = if !mask.is_inside(u, v) {
        PixelClass::Outside
    } else if neighbors.len() == 4 {
        PixelClass::Interior
    } else {
        PixelClass::Boundary
    };
    Ok(PixelInfo { class, neighbors })
}

#[inline]
pub(crate) fn is_interior(mask: &DomainMask, u: usize, v: usize) -> bool {
    mask.is_inside(u, v) && mask.inside_neighbors(u, v).count() == 4
}

/// Forward-difference gradient of a depth grid.
///
/// `p` is defined where the `+u` neighbor is inside, `q` where the `+v`
/// neighbor is inside; every other pixel holds the outside marker. The
/// result is discretely curl-free by construction.
pub fn fd_gradient(z: &ScalarGrid, mask: &DomainMask) -> Result<GradientField> {
    ensure_dims(mask.dims(), z.dims())?;
    let (w, h) = z.dims();
    let mut p = ScalarGrid::filled(w, h, OUTSIDE);
    let mut q = ScalarGrid::filled(w, h, OUTSIDE);
    for (u, v) in mask.inside_pixels() {
        if mask.is_inside(u + 1, v) {
            p.set(u, v, z.get(u + 1, v) - z.get(u, v));
        }
        if mask.is_inside(u, v + 1) {
            q.set(u, v, z.get(u, v + 1) - z.get(u, v));
        }
    }
    GradientField::new(p, q, mask.clone())
}

/// Central-difference divergence of `g` on interior pixels; outside marker
/// elsewhere.
pub fn central_divergence(g: &GradientField) -> ScalarGrid {
    let (w, h) = g.dims();
    let mut div = ScalarGrid::filled(w, h, OUTSIDE);
    for (u, v) in g.mask.inside_pixels() {
        if is_interior(&g.mask, u, v) {
            let value = 0.5 * (g.p.get(u + 1, v) - g.p.get(u - 1, v))
                + 0.5 * (g.q.get(u, v + 1) - g.q.get(u, v - 1));
            div.set(u, v, value);
        }
    }
    div
}

/// Five-point Laplacian on interior pixels; outside marker elsewhere.
pub fn discrete_laplacian(z: &ScalarGrid, mask: &DomainMask) -> Result<ScalarGrid> {
    ensure_dims(mask.dims(), z.dims())?;
    let (w, h) = z.dims();
    let mut lap = ScalarGrid::filled(w, h, OUTSIDE);
    for (u, v) in mask.inside_pixels() {
        if is_interior(mask, u, v) {
            let value = z.get(u + 1, v) + z.get(u - 1, v) + z.get(u, v + 1) + z.get(u, v - 1)
                - 4.0 * z.get(u, v);
            lap.set(u, v, value);
        }
    }
    Ok(lap)
}
