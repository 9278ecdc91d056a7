//! Analytic test surfaces with exact gradients, harmonic functions and noise
//! models.

use std::f64::consts::PI;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::camera::NormalField;
use crate::error::{Error, Result};
use crate::grid::{ensure_dims, DomainMask, GradientField, ScalarGrid, OUTSIDE};

/// Analytic surface family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceKind {
    /// Surface of revolution standing on a flat ground, with a silhouette
    /// mask. Depth jumps at the top and bottom rims.
    Vase,
    /// `z = a u + b v`.
    Plane { a: f64, b: f64 },
    /// Smooth non-periodic bumps: the classic "peaks" function mapped onto
    /// `[-3, 3]²`.
    PeaksSmooth,
    /// `z = sin(2π kx u / m) sin(2π ky v / n)`.
    SineProduct { kx: f64, ky: f64 },
}

impl FromStr for SurfaceKind {
    type Err = Error;

    /// Parses `vase`, `peaks`, `plane:a,b` or `sine:kx,ky`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = match s.split_once(':') {
            Some((name, args)) => (name, Some(args)),
            None => (s, None),
        };
        let pair = |args: Option<&str>| -> Result<(f64, f64)> {
            let args = args.ok_or_else(|| Error::Usage(format!("surface kind '{s}' needs two parameters")))?;
            let parts: Vec<&str> = args.split(',').collect();
            match parts.as_slice() {
                [a, b] => {
                    let parse = |x: &str| {
                        x.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Usage(format!("invalid number '{x}' in surface kind '{s}'")))
                    };
                    Ok((parse(a)?, parse(b)?))
                }
                _ => Err(Error::Usage(format!("surface kind '{s}' needs two parameters"))),
            }
        };
        match (name, args) {
            ("vase", None) => Ok(SurfaceKind::Vase),
            ("peaks" | "peaks_smooth", None) => Ok(SurfaceKind::PeaksSmooth),
            ("plane", args) => pair(args).map(|(a, b)| SurfaceKind::Plane { a, b }),
            ("sine" | "sine_product", args) => pair(args).map(|(kx, ky)| SurfaceKind::SineProduct { kx, ky }),
            _ => Err(Error::Usage(format!("unknown surface kind '{s}'"))),
        }
    }
}

/// Sampled surface: depth, exact gradient and reconstruction domain (the
/// gradient's mask).
#[derive(Debug, Clone, PartialEq)]
pub struct Surface {
    pub depth: ScalarGrid,
    pub gradient: GradientField,
}

impl Surface {
    pub fn mask(&self) -> &DomainMask {
        &self.gradient.mask
    }
}

/// Sample a surface and its closed-form gradient at pixel centers. Depth and
/// gradient cover the whole raster; the mask is the silhouette for the vase
/// and the full raster otherwise.
pub fn make_surface(kind: SurfaceKind, m: usize, n: usize) -> Result<Surface> {
    if m < 16 || n < 16 {
        return Err(Error::Usage(format!("surfaces need at least 16x16 pixels, got {m}x{n}")));
    }
    let eval: Box<dyn Fn(f64, f64) -> (f64, f64, f64)> = match kind {
        SurfaceKind::Plane { a, b } => Box::new(move |u, v| (a * u + b * v, a, b)),
        SurfaceKind::SineProduct { kx, ky } => {
            let (wx, wy) = (2.0 * PI * kx / m as f64, 2.0 * PI * ky / n as f64);
            Box::new(move |u, v| {
                let (su, cu) = (wx * u).sin_cos();
                let (sv, cv) = (wy * v).sin_cos();
                (su * sv, wx * cu * sv, wy * su * cv)
            })
        }
        SurfaceKind::PeaksSmooth => {
            let (sx, sy) = (6.0 / (m - 1) as f64, 6.0 / (n - 1) as f64);
            Box::new(move |u, v| {
                let (z, zx, zy) = peaks(sx * u - 3.0, sy * v - 3.0);
                (z, sx * zx, sy * zy)
            })
        }
        SurfaceKind::Vase => {
            let vase = Vase::new(m, n);
            Box::new(move |u, v| vase.eval(u, v))
        }
    };
    let mut depth = ScalarGrid::zeros(m, n);
    let mut p = ScalarGrid::zeros(m, n);
    let mut q = ScalarGrid::zeros(m, n);
    for v in 0..n {
        for u in 0..m {
            let (z, zu, zv) = eval(u as f64, v as f64);
            depth.set(u, v, z);
            p.set(u, v, zu);
            q.set(u, v, zv);
        }
    }
    let mask = match kind {
        SurfaceKind::Vase => {
            let vase = Vase::new(m, n);
            DomainMask::from_fn(m, n, |u, v| vase.inside(u as f64, v as f64))?
        }
        _ => DomainMask::full(m, n),
    };
    Ok(Surface {
        depth,
        gradient: GradientField::new(p, q, mask)?,
    })
}

/// The peaks function and its partial derivatives.
fn peaks(x: f64, y: f64) -> (f64, f64, f64) {
    let e1 = (-x * x - (y + 1.0).powi(2)).exp();
    let e2 = (-x * x - y * y).exp();
    let e3 = (-(x + 1.0).powi(2) - y * y).exp();
    let a = 3.0 * (1.0 - x).powi(2);
    let b = 10.0 * (x / 5.0 - x.powi(3) - y.powi(5));
    let z = a * e1 - b * e2 - e3 / 3.0;
    let zx = -6.0 * (1.0 - x) * e1 + a * (-2.0 * x) * e1 - 10.0 * (0.2 - 3.0 * x * x) * e2
        + b * 2.0 * x * e2
        + 2.0 * (x + 1.0) * e3 / 3.0;
    let zy = a * (-2.0 * (y + 1.0)) * e1 + 50.0 * y.powi(4) * e2 + b * 2.0 * y * e2 + 2.0 * y * e3 / 3.0;
    (z, zx, zy)
}

/// Vase profile: a hemispherical cross-section of radius `r(v)` centred on
/// the vertical axis `u = m/2`, standing on a ground plane at depth 0.
struct Vase {
    center: f64,
    v0: f64,
    v1: f64,
    span: f64,
    scale: f64,
}

impl Vase {
    fn new(m: usize, n: usize) -> Self {
        Self {
            center: m as f64 / 2.0,
            v0: 0.15 * n as f64,
            v1: 0.85 * n as f64,
            span: 0.7 * n as f64,
            scale: 0.25 * m as f64,
        }
    }

    /// Radius and its derivative with respect to `v`.
    fn radius(&self, v: f64) -> (f64, f64) {
        let t = (v - self.v0) / self.span;
        let (s, c) = (PI * t).sin_cos();
        let (s3, c3) = (3.0 * PI * t).sin_cos();
        let shape = 0.55 + 0.45 * s * (1.0 - 0.35 * c3);
        let dshape = 0.45 * (PI * c * (1.0 - 0.35 * c3) + s * 0.35 * 3.0 * PI * s3);
        (self.scale * shape, self.scale * dshape / self.span)
    }

    /// Strict inequality keeps every silhouette pixel at positive height, so
    /// the closed-form gradient stays finite.
    fn inside(&self, u: f64, v: f64) -> bool {
        v >= self.v0 && v <= self.v1 && (u - self.center).abs() < self.radius(v).0
    }

    fn eval(&self, u: f64, v: f64) -> (f64, f64, f64) {
        if !self.inside(u, v) {
            return (0.0, 0.0, 0.0);
        }
        let (r, dr) = self.radius(v);
        let x = u - self.center;
        let z = (r * r - x * x).sqrt();
        (z, -x / z, r * dr / z)
    }
}

/// Harmonic family with `Δh = 0` in the continuum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HarmonicFamily {
    /// `cos(ωu) e^{ωv}`.
    CosExp,
    /// `sin(ωu) e^{ωv}`.
    SinExp,
}

fn check_harmonic(omega: f64, n: usize) -> Result<()> {
    if !omega.is_finite() || omega <= 0.0 {
        return Err(Error::Usage(format!("harmonic frequency must be positive, got {omega}")));
    }
    if omega * n as f64 > 700.0 {
        return Err(Error::Usage(format!(
            "harmonic overflow guard: ω·n = {} exceeds 700",
            omega * n as f64
        )));
    }
    Ok(())
}

/// Samples of a harmonic function on an `m x n` raster.
pub fn make_harmonic(family: HarmonicFamily, omega: f64, m: usize, n: usize) -> Result<ScalarGrid> {
    check_harmonic(omega, n)?;
    Ok(ScalarGrid::from_fn(m, n, |u, v| {
        let e = (omega * v as f64).exp();
        match family {
            HarmonicFamily::CosExp => (omega * u as f64).cos() * e,
            HarmonicFamily::SinExp => (omega * u as f64).sin() * e,
        }
    }))
}

/// Closed-form gradient of [`make_harmonic`] on the full raster.
pub fn harmonic_gradient(family: HarmonicFamily, omega: f64, m: usize, n: usize) -> Result<GradientField> {
    check_harmonic(omega, n)?;
    let grad = |u: usize, v: usize| {
        let e = (omega * v as f64).exp();
        let (s, c) = (omega * u as f64).sin_cos();
        match family {
            HarmonicFamily::CosExp => (-omega * s * e, omega * c * e),
            HarmonicFamily::SinExp => (omega * c * e, omega * s * e),
        }
    };
    let p = ScalarGrid::from_fn(m, n, |u, v| grad(u, v).0);
    let q = ScalarGrid::from_fn(m, n, |u, v| grad(u, v).1);
    GradientField::full(p, q)
}

/// Noise model for [`add_gradient_noise`] and [`add_normal_noise`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    /// I.i.d. zero-mean Gaussian added to `p` and `q`.
    GradientGaussian { sigma: f64 },
    /// Each normal is tilted by a Gaussian angle (radians) about a uniformly
    /// random axis perpendicular to it.
    NormalAngleGaussian { sigma: f64 },
}

impl NoiseModel {
    pub fn sigma(&self) -> f64 {
        match *self {
            NoiseModel::GradientGaussian { sigma } | NoiseModel::NormalAngleGaussian { sigma } => sigma,
        }
    }
}

fn normal_dist(sigma: f64) -> Result<Normal<f64>> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::Usage(format!("noise level must be non-negative, got {sigma}")));
    }
    Normal::new(0.0, sigma).map_err(|e| Error::Usage(e.to_string()))
}

/// Gradient field with Gaussian noise of standard deviation `sigma` added to
/// both components on inside pixels.
pub fn add_gradient_noise(g: &GradientField, sigma: f64, seed: u64) -> Result<GradientField> {
    let dist = normal_dist(sigma)?;
    if sigma == 0.0 {
        return Ok(g.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = g.clone();
    for (u, v) in g.mask.inside_pixels() {
        let dp = dist.sample(&mut rng);
        let dq = dist.sample(&mut rng);
        out.p.set(u, v, g.p.get(u, v) + dp);
        out.q.set(u, v, g.q.get(u, v) + dq);
    }
    Ok(out)
}

/// Normal field with every valid normal tilted by an angle drawn from
/// `N(0, sigma²)` about a random perpendicular axis, then renormalised.
pub fn add_normal_noise(nf: &NormalField, sigma: f64, seed: u64) -> Result<NormalField> {
    let dist = normal_dist(sigma)?;
    if sigma == 0.0 {
        return Ok(nf.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = nf.clone();
    for (u, v) in nf.valid.inside_pixels() {
        let n = [nf.n1.get(u, v), nf.n2.get(u, v), nf.n3.get(u, v)];
        let (a, b) = tangent_basis(n);
        let phi = rng.random_range(0.0..2.0 * PI);
        let theta = dist.sample(&mut rng);
        let (sp, cp) = phi.sin_cos();
        let (st, ct) = theta.sin_cos();
        let mut r = [0.0; 3];
        for i in 0..3 {
            r[i] = ct * n[i] + st * (cp * a[i] + sp * b[i]);
        }
        let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        out.n1.set(u, v, r[0] / len);
        out.n2.set(u, v, r[1] / len);
        out.n3.set(u, v, r[2] / len);
    }
    Ok(out)
}

/// Two unit vectors completing `n` to an orthonormal basis.
fn tangent_basis(n: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let helper = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let cross = |x: [f64; 3], y: [f64; 3]| {
        [
            x[1] * y[2] - x[2] * y[1],
            x[2] * y[0] - x[0] * y[2],
            x[0] * y[1] - x[1] * y[0],
        ]
    };
    let a = cross(n, helper);
    let len = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    let a = [a[0] / len, a[1] / len, a[2] / len];
    (a, cross(n, a))
}

/// Gradient whose trapezoidal edge averages reproduce the depth differences
/// of `z` exactly: `(p(u,v) + p(u+1,v)) / 2 = z(u+1,v) - z(u,v)` along every
/// inside edge, and likewise for `q`.
///
/// Such fields are the exactly integrable inputs of the least-squares
/// solvers; `p` starts at 0 on each horizontal run of inside pixels and `q`
/// on each vertical run.
pub fn edge_consistent_gradient(z: &ScalarGrid, mask: &DomainMask) -> Result<GradientField> {
    ensure_dims(mask.dims(), z.dims())?;
    let (w, h) = mask.dims();
    let mut p = ScalarGrid::filled(w, h, OUTSIDE);
    let mut q = ScalarGrid::filled(w, h, OUTSIDE);
    for v in 0..h {
        for u in 0..w {
            if !mask.is_inside(u, v) {
                continue;
            }
            let pu = if u > 0 && mask.is_inside(u - 1, v) {
                2.0 * (z.get(u, v) - z.get(u - 1, v)) - p.get(u - 1, v)
            } else {
                0.0
            };
            p.set(u, v, pu);
            let qv = if v > 0 && mask.is_inside(u, v - 1) {
                2.0 * (z.get(u, v) - z.get(u, v - 1)) - q.get(u, v - 1)
            } else {
                0.0
            };
            q.set(u, v, qv);
        }
    }
    GradientField::new(p, q, mask.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::fd_gradient;
    use crate::metrics::e_int;

    #[test]
    fn plane_is_exact() {
        let s = make_surface(SurfaceKind::Plane { a: 1.0, b: 0.0 }, 16, 20).unwrap();
        for v in 0..20 {
            for u in 0..16 {
                assert_eq!(s.depth.get(u, v), u as f64);
                assert_eq!(s.gradient.p.get(u, v), 1.0);
                assert_eq!(s.gradient.q.get(u, v), 0.0);
            }
        }
        assert!(s.mask().is_full());
    }

    #[test]
    fn small_or_unknown_surfaces_rejected() {
        assert!(matches!(make_surface(SurfaceKind::Vase, 15, 32), Err(Error::Usage(_))));
        assert!(matches!("teapot".parse::<SurfaceKind>(), Err(Error::Usage(_))));
        assert!(matches!("plane:1".parse::<SurfaceKind>(), Err(Error::Usage(_))));
        assert_eq!("plane:1,2".parse::<SurfaceKind>().unwrap(), SurfaceKind::Plane { a: 1.0, b: 2.0 });
        assert_eq!(
            "sine:1,3".parse::<SurfaceKind>().unwrap(),
            SurfaceKind::SineProduct { kx: 1.0, ky: 3.0 }
        );
    }

    #[test]
    fn sine_product_gradient_spot_checks() {
        let (m, n) = (32, 24);
        let s = make_surface(SurfaceKind::SineProduct { kx: 2.0, ky: 1.0 }, m, n).unwrap();
        let (a, b) = (4.0 * PI / 32.0, 2.0 * PI / 24.0);
        for (u, v) in [(0, 0), (3, 5), (17, 11), (31, 23), (8, 6)] {
            let (x, y) = (u as f64, v as f64);
            assert!((s.gradient.p.get(u, v) - a * (a * x).cos() * (b * y).sin()).abs() < 1e-14);
            assert!((s.gradient.q.get(u, v) - b * (a * x).sin() * (b * y).cos()).abs() < 1e-14);
        }
    }

    fn check_derivatives(kind: SurfaceKind, mask_only: bool) {
        // Central differences of the sampled closed form at a fine step.
        let (m, n) = (40, 36);
        let s = make_surface(kind, m, n).unwrap();
        let eval = |u: f64, v: f64| -> f64 {
            match kind {
                SurfaceKind::PeaksSmooth => {
                    let (sx, sy) = (6.0 / (m - 1) as f64, 6.0 / (n - 1) as f64);
                    peaks(sx * u - 3.0, sy * v - 3.0).0
                }
                SurfaceKind::Vase => Vase::new(m, n).eval(u, v).0,
                _ => unreachable!(),
            }
        };
        let h = 1e-6;
        for (u, v) in s.mask().inside_pixels() {
            let (x, y) = (u as f64, v as f64);
            if mask_only {
                let vase = Vase::new(m, n);
                let interior = [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)]
                    .iter()
                    .all(|(du, dv)| vase.inside(x + du, y + dv));
                if !interior || vase.eval(x, y).0 < 1.0 {
                    continue;
                }
            }
            let du = (eval(x + h, y) - eval(x - h, y)) / (2.0 * h);
            let dv = (eval(x, y + h) - eval(x, y - h)) / (2.0 * h);
            let scale = 1.0 + du.abs().max(dv.abs());
            assert!((s.gradient.p.get(u, v) - du).abs() < 1e-5 * scale, "p at ({u}, {v})");
            assert!((s.gradient.q.get(u, v) - dv).abs() < 1e-5 * scale, "q at ({u}, {v})");
        }
    }

    #[test]
    fn peaks_and_vase_derivatives_are_closed_form() {
        check_derivatives(SurfaceKind::PeaksSmooth, false);
        check_derivatives(SurfaceKind::Vase, true);
    }

    #[test]
    fn vase_integrability_trap() {
        let s = make_surface(SurfaceKind::Vase, 312, 312).unwrap();
        let full = s.gradient.with_mask(DomainMask::full(312, 312)).unwrap();
        assert!(e_int(&full) > 0.0);
        let fd = fd_gradient(&s.depth, &DomainMask::full(312, 312)).unwrap();
        assert!(e_int(&fd) <= 1e-12);
        assert!(s.mask().count_inside() > 312 * 312 / 10);
        for (u, v) in s.mask().inside_pixels() {
            assert!(s.depth.get(u, v) > 0.0);
            assert!(s.gradient.p.get(u, v).is_finite() && s.gradient.q.get(u, v).is_finite());
        }
    }

    #[test]
    fn harmonic_limits_and_guards() {
        let z = make_harmonic(HarmonicFamily::CosExp, 1e-12, 8, 8).unwrap();
        assert!(z.values().iter().all(|x| (x - 1.0).abs() < 1e-10));
        assert!(matches!(make_harmonic(HarmonicFamily::SinExp, 0.0, 8, 8), Err(Error::Usage(_))));
        assert!(matches!(make_harmonic(HarmonicFamily::SinExp, 10.0, 8, 71), Err(Error::Usage(_))));
        assert!(make_harmonic(HarmonicFamily::SinExp, 10.0, 8, 70).is_ok());
    }

    #[test]
    fn harmonic_laplacian_is_fourth_order() {
        let lap = |omega: f64| {
            let z = make_harmonic(HarmonicFamily::CosExp, omega, 64, 64).unwrap();
            let l = crate::grid::discrete_laplacian(&z, &DomainMask::full(64, 64)).unwrap();
            let interior = DomainMask::from_fn(64, 64, |u, v| u > 0 && v > 0 && u < 63 && v < 63).unwrap();
            l.max_abs_on(&interior) / z.max_abs_on(&interior)
        };
        for omega in [0.2, 0.1, 0.05] {
            let ratio = lap(omega) / lap(omega / 2.0);
            assert!((12.0..=20.0).contains(&ratio), "ω = {omega}: ratio {ratio}");
        }
    }

    #[test]
    fn harmonic_gradient_matches_differences() {
        let omega = 0.05;
        let g = harmonic_gradient(HarmonicFamily::SinExp, omega, 16, 16).unwrap();
        let z = |u: f64, v: f64| (omega * u).sin() * (omega * v).exp();
        for (u, v) in [(3usize, 4usize), (10, 12)] {
            let (x, y) = (u as f64, v as f64);
            let h = 1e-6;
            let du = (z(x + h, y) - z(x - h, y)) / (2.0 * h);
            let dv = (z(x, y + h) - z(x, y - h)) / (2.0 * h);
            assert!((g.p.get(u, v) - du).abs() < 1e-8);
            assert!((g.q.get(u, v) - dv).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_noise_is_identity_and_seeds_are_deterministic() {
        let s = make_surface(SurfaceKind::PeaksSmooth, 32, 32).unwrap();
        assert_eq!(add_gradient_noise(&s.gradient, 0.0, 3).unwrap(), s.gradient);
        let a = add_gradient_noise(&s.gradient, 0.1, 3).unwrap();
        let b = add_gradient_noise(&s.gradient, 0.1, 3).unwrap();
        assert_eq!(a.p.values(), b.p.values());
        assert_eq!(a.q.values(), b.q.values());
        let c = add_gradient_noise(&s.gradient, 0.1, 4).unwrap();
        assert_ne!(a.p.values(), c.p.values());
        assert!(matches!(add_gradient_noise(&s.gradient, -1.0, 3), Err(Error::Usage(_))));
    }

    #[test]
    fn gradient_noise_has_requested_deviation() {
        let g = GradientField::full(ScalarGrid::zeros(64, 64), ScalarGrid::zeros(64, 64)).unwrap();
        let noisy = add_gradient_noise(&g, 0.05, 11).unwrap();
        let samples = noisy.p.values();
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (samples.len() - 1) as f64;
        assert!((var.sqrt() - 0.05).abs() <= 0.005);
    }

    #[test]
    fn normal_noise_tilts_by_requested_angle() {
        let s = make_surface(SurfaceKind::PeaksSmooth, 64, 64).unwrap();
        let nf = NormalField::from_gradient(&s.gradient).unwrap();
        assert_eq!(add_normal_noise(&nf, 0.0, 1).unwrap(), nf);
        let noisy = add_normal_noise(&nf, 0.02, 1).unwrap();
        let again = add_normal_noise(&nf, 0.02, 1).unwrap();
        assert_eq!(noisy, again);
        let mut sum_sq = 0.0;
        for (u, v) in nf.valid.inside_pixels() {
            let a = [nf.n1.get(u, v), nf.n2.get(u, v), nf.n3.get(u, v)];
            let b = [noisy.n1.get(u, v), noisy.n2.get(u, v), noisy.n3.get(u, v)];
            let len = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
            assert!((len - 1.0).abs() < 1e-12);
            let dot = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).clamp(-1.0, 1.0);
            sum_sq += dot.acos().powi(2);
        }
        let rms = (sum_sq / nf.valid.count_inside() as f64).sqrt();
        assert!((rms - 0.02).abs() <= 0.002, "rms angle {rms}");
    }

    #[test]
    fn edge_consistent_gradient_reproduces_differences() {
        let mask = DomainMask::from_fn(9, 7, |u, v| (u + v) % 5 != 0).unwrap();
        let z = ScalarGrid::from_fn(9, 7, |u, v| (u as f64 * 0.7).sin() + v as f64 * v as f64 * 0.1);
        let g = edge_consistent_gradient(&z, &mask).unwrap();
        for (u, v) in mask.inside_pixels() {
            if mask.is_inside(u + 1, v) {
                let avg = 0.5 * (g.p.get(u, v) + g.p.get(u + 1, v));
                assert!((avg - (z.get(u + 1, v) - z.get(u, v))).abs() < 1e-12);
            }
            if mask.is_inside(u, v + 1) {
                let avg = 0.5 * (g.q.get(u, v) + g.q.get(u, v + 1));
                assert!((avg - (z.get(u, v + 1) - z.get(u, v))).abs() < 1e-12);
            }
        }
    }
}
