//! Camera models: normal field to gradient field conversion, occluding
//! contour detection and back-projection of depth maps.

use crate::error::{Error, Result};
use crate::grid::{ensure_dims, DomainMask, GradientField, ScalarGrid, OUTSIDE};

/// Default occluding-contour tolerance (relative to the focal length under
/// perspective).
pub const DEFAULT_EPS: f64 = 1e-6;

/// Unit normals in the camera frame, pointing toward the camera.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalField {
    pub n1: ScalarGrid,
    pub n2: ScalarGrid,
    pub n3: ScalarGrid,
    pub valid: DomainMask,
}

impl NormalField {
    /// Builds a field and checks unit length (within 1e-6) on valid pixels.
    pub fn new(n1: ScalarGrid, n2: ScalarGrid, n3: ScalarGrid, valid: DomainMask) -> Result<Self> {
        ensure_dims(valid.dims(), n1.dims())?;
        ensure_dims(valid.dims(), n2.dims())?;
        ensure_dims(valid.dims(), n3.dims())?;
        for (u, v) in valid.inside_pixels() {
            let norm = (n1.get(u, v).powi(2) + n2.get(u, v).powi(2) + n3.get(u, v).powi(2)).sqrt();
            if norm.is_nan() || (norm - 1.0).abs() > 1e-6 {
                return Err(Error::Data(format!(
                    "normal at pixel ({u}, {v}) has length {norm}, expected 1"
                )));
            }
        }
        Ok(Self { n1, n2, n3, valid })
    }

    /// Orthographic normals `[p, q, -1] / sqrt(1 + p^2 + q^2)` of a gradient
    /// field.
    pub fn from_gradient(g: &GradientField) -> Result<Self> {
        g.check_finite()?;
        let (w, h) = g.dims();
        let mut n1 = ScalarGrid::filled(w, h, OUTSIDE);
        let mut n2 = n1.clone();
        let mut n3 = n1.clone();
        for (u, v) in g.mask.inside_pixels() {
            let (p, q) = (g.p.get(u, v), g.q.get(u, v));
            let s = (1.0 + p * p + q * q).sqrt();
            n1.set(u, v, p / s);
            n2.set(u, v, q / s);
            n3.set(u, v, -1.0 / s);
        }
        Self::new(n1, n2, n3, g.mask.clone())
    }

    pub fn dims(&self) -> (usize, usize) {
        self.valid.dims()
    }
}

/// Projection model with its intrinsic parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CameraModel {
    Orthographic,
    /// Scaled orthographic projection with magnification `f / d`.
    WeakPerspective { magnification: f64 },
    /// Pinhole camera; pixel coordinates are taken relative to the principal
    /// point.
    Perspective {
        focal: f64,
        principal_point: (f64, f64),
    },
}

impl CameraModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CameraModel::Orthographic => Ok(()),
            CameraModel::WeakPerspective { magnification } => {
                if magnification > 0.0 && magnification.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Config(format!(
                        "weak-perspective magnification must be positive, got {magnification}"
                    )))
                }
            }
            CameraModel::Perspective {
                focal,
                principal_point,
            } => {
                if !(focal > 0.0 && focal.is_finite()) {
                    return Err(Error::Config(format!(
                        "perspective focal length must be positive, got {focal}"
                    )));
                }
                if !(principal_point.0.is_finite() && principal_point.1.is_finite()) {
                    return Err(Error::Config("principal point must be finite".into()));
                }
                Ok(())
            }
        }
    }

    /// Whether the integrated quantity is log-depth (perspective) rather than
    /// depth.
    pub fn integrates_log_depth(&self) -> bool {
        matches!(self, CameraModel::Perspective { .. })
    }
}

/// Output of [`normals_to_gradient`].
#[derive(Debug, Clone)]
pub struct ConvertedGradient {
    /// Gradient of depth (orthographic, weak-perspective) or log-depth
    /// (perspective); occluding pixels are removed from its mask.
    pub gradient: GradientField,
    /// Occluding-contour flags, row-major.
    pub occluding: Vec<bool>,
}

/// Convert a normal field into the gradient field to integrate.
///
/// Valid pixels whose normal is (numerically) parallel to the image plane,
/// or whose perspective system is singular, are flagged as occluding and
/// dropped from the output domain.
pub fn normals_to_gradient(
    nf: &NormalField,
    cam: &CameraModel,
    eps: f64,
) -> Result<ConvertedGradient> {
    cam.validate()?;
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::Config(format!("eps must be non-negative, got {eps}")));
    }
    let (w, h) = nf.dims();
    let mut p = ScalarGrid::filled(w, h, OUTSIDE);
    let mut q = ScalarGrid::filled(w, h, OUTSIDE);
    let mut occluding = vec![false; w * h];
    for (u, v) in nf.valid.inside_pixels() {
        let (n1, n2, n3) = (nf.n1.get(u, v), nf.n2.get(u, v), nf.n3.get(u, v));
        let i = v * w + u;
        match *cam {
            CameraModel::Orthographic | CameraModel::WeakPerspective { .. } => {
                if n3.abs() <= eps {
                    occluding[i] = true;
                    continue;
                }
                if n3 > 0.0 {
                    return Err(Error::Data(format!(
                        "normal at pixel ({u}, {v}) points away from the camera (n3 = {n3})"
                    )));
                }
                let scale = match *cam {
                    CameraModel::WeakPerspective { magnification } => magnification,
                    _ => 1.0,
                };
                p.set(u, v, -n1 / n3 / scale);
                q.set(u, v, -n2 / n3 / scale);
            }
            CameraModel::Perspective {
                focal,
                principal_point: (u0, v0),
            } => {
                let denom = perspective_denominator(u as f64 - u0, v as f64 - v0, focal, n1, n2, n3);
                if denom.abs() <= eps * focal {
                    occluding[i] = true;
                    continue;
                }
                if denom > 0.0 {
                    return Err(Error::Data(format!(
                        "normal at pixel ({u}, {v}) faces away from the viewing ray"
                    )));
                }
                p.set(u, v, -n1 / denom);
                q.set(u, v, -n2 / denom);
            }
        }
    }
    let mask = nf.valid.without(&occluding)?;
    let gradient = GradientField::new(p, q, mask)?;
    Ok(ConvertedGradient {
        gradient,
        occluding,
    })
}

/// `u n1 + v n2 + f n3`, the quantity whose vanishing marks the perspective
/// occluding contour.
#[inline]
pub fn perspective_denominator(u: f64, v: f64, focal: f64, n1: f64, n2: f64, n3: f64) -> f64 {
    u * n1 + v * n2 + focal * n3
}

/// Exponentiate an integrated log-depth map, fixing the multiplicative
/// constant so that the anchor pixel takes `anchor_value`.
///
/// Pixels outside `mask` hold the outside marker.
pub fn log_depth_to_depth(
    log_depth: &ScalarGrid,
    mask: &DomainMask,
    anchor_value: f64,
    anchor_pixel: (usize, usize),
) -> Result<ScalarGrid> {
    ensure_dims(mask.dims(), log_depth.dims())?;
    let (au, av) = anchor_pixel;
    if !mask.is_inside(au, av) {
        return Err(Error::Usage(format!(
            "anchor pixel ({au}, {av}) is outside the domain"
        )));
    }
    if !(anchor_value > 0.0 && anchor_value.is_finite()) {
        return Err(Error::Usage(format!(
            "anchor depth must be positive, got {anchor_value}"
        )));
    }
    let reference = log_depth.get(au, av);
    let depth = log_depth.map(|zt| (zt - reference).exp() * anchor_value);
    depth.masked(mask)
}

/// A back-projected 3D point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Back-project every inside pixel of a depth map (row-major order).
pub fn depth_to_points(z: &ScalarGrid, mask: &DomainMask, cam: &CameraModel) -> Result<Vec<Point3>> {
    ensure_dims(mask.dims(), z.dims())?;
    cam.validate()?;
    mask.inside_pixels()
        .map(|(u, v)| {
            let depth = z.get(u, v);
            if !depth.is_finite() {
                return Err(Error::Data(format!("depth is not finite at pixel ({u}, {v})")));
            }
            let (uf, vf) = (u as f64, v as f64);
            let (x, y) = match *cam {
                CameraModel::Orthographic => (uf, vf),
                CameraModel::WeakPerspective { magnification } => {
                    (uf / magnification, vf / magnification)
                }
                CameraModel::Perspective {
                    focal,
                    principal_point: (u0, v0),
                } => {
                    if depth <= 0.0 {
                        return Err(Error::Data(format!(
                            "non-positive depth {depth} at pixel ({u}, {v}) under perspective"
                        )));
                    }
                    (depth / focal * (uf - u0), depth / focal * (vf - v0))
                }
            };
            Ok(Point3 { x, y, z: depth })
        })
        .collect()
}
