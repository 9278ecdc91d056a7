//! Raster file formats: PFM depth, gradient and normal maps, PGM masks and
//! PNG previews.
//!
//! PFM files are written little-endian (scale `-1.0`) with rows stored
//! bottom-to-top; outside pixels are written as NaN. Both byte orders are
//! read. A gradient field `G` is stored as `G.p.pfm` and `G.q.pfm`.

use std::fs;
use std::path::{Path, PathBuf};

use crate::camera::NormalField;
use crate::error::{FormatError, Result};
use crate::grid::{DomainMask, GradientField, ScalarGrid, OUTSIDE};

fn io_error(path: &Path, source: std::io::Error) -> FormatError {
    FormatError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    Ok(fs::read(path).map_err(|e| io_error(path, e))?)
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    Ok(fs::write(path, bytes).map_err(|e| io_error(path, e))?)
}

/// Whitespace-separated header tokens of the netpbm family.
struct HeaderReader<'a> {
    path: &'a Path,
    bytes: &'a [u8],
    pos: usize,
    /// Offset of the most recent token.
    token_at: usize,
}

impl<'a> HeaderReader<'a> {
    fn new(path: &'a Path, bytes: &'a [u8]) -> Self {
        Self {
            path,
            bytes,
            pos: 0,
            token_at: 0,
        }
    }

    fn malformed(&self, reason: impl Into<String>) -> FormatError {
        FormatError::MalformedHeader {
            path: self.path.to_path_buf(),
            offset: self.pos as u64,
            reason: reason.into(),
        }
    }

    /// Next token, skipping whitespace and `#` comments.
    fn token(&mut self, what: &str) -> Result<&'a str, FormatError> {
        loop {
            match self.bytes.get(self.pos) {
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(b'#') => {
                    while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                        self.pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(self.malformed(format!("missing {what}"))),
            }
        }
        let start = self.pos;
        self.token_at = start;
        while self.bytes.get(self.pos).is_some_and(|b| !b.is_ascii_whitespace()) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).map_err(|_| {
            let mut err = self.malformed(format!("non-ASCII {what}"));
            if let FormatError::MalformedHeader { offset, .. } = &mut err {
                *offset = start as u64;
            }
            err
        })
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, FormatError> {
        let token = self.token(what)?;
        token.parse().map_err(|_| FormatError::MalformedHeader {
            path: self.path.to_path_buf(),
            offset: self.token_at as u64,
            reason: format!("invalid {what} '{token}'"),
        })
    }

    fn dimension(&mut self, what: &str) -> Result<usize, FormatError> {
        let value: usize = self.number(what)?;
        if value == 0 {
            return Err(FormatError::MalformedHeader {
                path: self.path.to_path_buf(),
                offset: self.token_at as u64,
                reason: format!("{what} must be positive"),
            });
        }
        Ok(value)
    }

    /// Consume the single whitespace byte that ends the header.
    fn end_of_header(&mut self) -> Result<usize, FormatError> {
        match self.bytes.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => Ok(self.pos + 1),
            _ => Err(self.malformed("header must end with a whitespace byte")),
        }
    }
}

fn payload<'a>(path: &Path, bytes: &'a [u8], offset: usize, expected: usize) -> Result<&'a [u8], FormatError> {
    let found = bytes.len() - offset;
    if found < expected {
        return Err(FormatError::Truncated {
            path: path.to_path_buf(),
            offset: offset as u64,
            expected: expected as u64,
            found: found as u64,
        });
    }
    Ok(&bytes[offset..offset + expected])
}

/// Decoded PFM planes, each a full raster in top-to-bottom row order.
fn decode_pfm(path: &Path, bytes: &[u8]) -> Result<Vec<ScalarGrid>> {
    let mut header = HeaderReader::new(path, bytes);
    let channels = match header.token("magic number")? {
        "Pf" => 1,
        "PF" => 3,
        other => return Err(header.malformed(format!("unknown magic number '{other}'")).into()),
    };
    let width = header.dimension("width")?;
    let height = header.dimension("height")?;
    let scale: f64 = header.number("scale")?;
    let scale_at = header.token_at;
    if scale == 0.0 || !scale.is_finite() {
        return Err(FormatError::MalformedHeader {
            path: path.to_path_buf(),
            offset: scale_at as u64,
            reason: format!("scale must be non-zero, got {scale}"),
        }
        .into());
    }
    let little_endian = scale < 0.0;
    let offset = header.end_of_header()?;
    let expected = width
        .checked_mul(height)
        .and_then(|x| x.checked_mul(4 * channels))
        .ok_or_else(|| header.malformed("raster too large"))?;
    let data = payload(path, bytes, offset, expected)?;
    let mut planes = vec![ScalarGrid::zeros(width, height); channels];
    for (i, chunk) in data.chunks_exact(4).enumerate() {
        let raw = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let value = if little_endian {
            f32::from_le_bytes(raw)
        } else {
            f32::from_be_bytes(raw)
        };
        let pixel = i / channels;
        let (u, row) = (pixel % width, pixel / width);
        planes[i % channels].set(u, height - 1 - row, value as f64);
    }
    Ok(planes)
}

fn encode_pfm(planes: &[&ScalarGrid]) -> Vec<u8> {
    let (width, height) = planes[0].dims();
    let magic = if planes.len() == 1 { "Pf" } else { "PF" };
    let mut out = format!("{magic}\n{width} {height}\n-1.0\n").into_bytes();
    out.reserve(width * height * planes.len() * 4);
    for row in (0..height).rev() {
        for u in 0..width {
            for plane in planes {
                let value = plane.get(u, row);
                let value = if value.is_finite() { value as f32 } else { f32::NAN };
                out.extend_from_slice(&value.to_le_bytes());
            }
        }
    }
    out
}

fn expect_dims(path: &Path, expected: (usize, usize), got: (usize, usize), offset: u64) -> Result<()> {
    if expected == got {
        return Ok(());
    }
    Err(FormatError::DimensionMismatch {
        path: path.to_path_buf(),
        offset,
        expected_width: expected.0,
        expected_height: expected.1,
        width: got.0,
        height: got.1,
    }
    .into())
}

/// Byte offset of the width field, reported by dimension mismatches.
const PFM_DIMS_OFFSET: u64 = 3;

/// Read a single-channel PFM raster. Non-finite samples are kept as NaN.
pub fn read_pfm(path: impl AsRef<Path>) -> Result<ScalarGrid> {
    let path = path.as_ref();
    let bytes = read_bytes(path)?;
    let mut planes = decode_pfm(path, &bytes)?;
    if planes.len() != 1 {
        return Err(FormatError::Invalid {
            path: path.to_path_buf(),
            reason: "expected a single-channel 'Pf' raster, found a 3-channel 'PF' raster".into(),
        }
        .into());
    }
    Ok(planes.pop().expect("one plane"))
}

/// Write a single-channel PFM raster; pixels outside `mask` (if given) and
/// non-finite values are written as NaN.
pub fn write_pfm(path: impl AsRef<Path>, grid: &ScalarGrid, mask: Option<&DomainMask>) -> Result<()> {
    let grid = match mask {
        Some(mask) => grid.masked(mask)?,
        None => grid.clone(),
    };
    write_bytes(path.as_ref(), &encode_pfm(&[&grid]))
}

/// Mask of pixels whose value is finite in every grid.
fn finite_mask(path: &Path, grids: &[&ScalarGrid]) -> Result<DomainMask> {
    let (w, h) = grids[0].dims();
    let inside: Vec<bool> = (0..w * h)
        .map(|i| grids.iter().all(|g| g.values()[i].is_finite()))
        .collect();
    if !inside.iter().any(|&x| x) {
        return Err(FormatError::Invalid {
            path: path.to_path_buf(),
            reason: "raster has no finite pixel".into(),
        }
        .into());
    }
    DomainMask::from_vec(w, h, inside)
}

/// Paths of the two files of a gradient field stored under `prefix`.
pub fn gradient_paths(prefix: impl AsRef<Path>) -> (PathBuf, PathBuf) {
    let prefix = prefix.as_ref().as_os_str().to_owned();
    let mut p = prefix.clone();
    p.push(".p.pfm");
    let mut q = prefix;
    q.push(".q.pfm");
    (PathBuf::from(p), PathBuf::from(q))
}

/// Read a gradient field from `prefix.p.pfm` and `prefix.q.pfm`.
///
/// Without an explicit mask, the domain is the set of pixels where both
/// components are finite. With a mask, every inside pixel must be finite.
pub fn read_gradient(prefix: impl AsRef<Path>, mask: Option<DomainMask>) -> Result<GradientField> {
    let (p_path, q_path) = gradient_paths(prefix);
    let p = read_pfm(&p_path)?;
    let q = read_pfm(&q_path)?;
    expect_dims(&q_path, p.dims(), q.dims(), PFM_DIMS_OFFSET)?;
    let mask = match mask {
        Some(mask) => {
            expect_dims(&p_path, mask.dims(), p.dims(), PFM_DIMS_OFFSET)?;
            mask
        }
        None => finite_mask(&p_path, &[&p, &q])?,
    };
    let g = GradientField::new(p, q, mask)?;
    g.check_finite()?;
    Ok(g)
}

/// Write a gradient field to `prefix.p.pfm` and `prefix.q.pfm`.
pub fn write_gradient(prefix: impl AsRef<Path>, g: &GradientField) -> Result<()> {
    let (p_path, q_path) = gradient_paths(prefix);
    write_pfm(p_path, &g.p, Some(&g.mask))?;
    write_pfm(q_path, &g.q, Some(&g.mask))
}

/// Read a normal field from a three-channel `PF` raster; pixels with any
/// non-finite component are invalid.
pub fn read_normals(path: impl AsRef<Path>) -> Result<NormalField> {
    let path = path.as_ref();
    let bytes = read_bytes(path)?;
    let planes = decode_pfm(path, &bytes)?;
    if planes.len() != 3 {
        return Err(FormatError::Invalid {
            path: path.to_path_buf(),
            reason: "expected a 3-channel 'PF' normal map, found a single-channel 'Pf' raster".into(),
        }
        .into());
    }
    let valid = finite_mask(path, &[&planes[0], &planes[1], &planes[2]])?;
    let [n1, n2, n3]: [ScalarGrid; 3] = planes.try_into().expect("three planes");
    // Stored as 32-bit floats, so unit length holds only to about 1e-7.
    let renormalise = |i: usize| {
        let (a, b, c) = (n1.values()[i], n2.values()[i], n3.values()[i]);
        let len = (a * a + b * b + c * c).sqrt();
        if len > 0.0 {
            (a / len, b / len, c / len)
        } else {
            (a, b, c)
        }
    };
    let (w, h) = valid.dims();
    let mut out = [ScalarGrid::filled(w, h, OUTSIDE), ScalarGrid::filled(w, h, OUTSIDE), ScalarGrid::filled(w, h, OUTSIDE)];
    for (u, v) in valid.inside_pixels() {
        let i = v * w + u;
        let (a, b, c) = renormalise(i);
        let len = (n1.values()[i].powi(2) + n2.values()[i].powi(2) + n3.values()[i].powi(2)).sqrt();
        if (len - 1.0).abs() > 1e-4 {
            return Err(FormatError::Invalid {
                path: path.to_path_buf(),
                reason: format!("normal at pixel ({u}, {v}) has length {len}, expected 1"),
            }
            .into());
        }
        out[0].set(u, v, a);
        out[1].set(u, v, b);
        out[2].set(u, v, c);
    }
    let [a, b, c] = out;
    NormalField::new(a, b, c, valid)
}

/// Write a normal field as a three-channel `PF` raster.
pub fn write_normals(path: impl AsRef<Path>, nf: &NormalField) -> Result<()> {
    let n1 = nf.n1.masked(&nf.valid)?;
    let n2 = nf.n2.masked(&nf.valid)?;
    let n3 = nf.n3.masked(&nf.valid)?;
    write_bytes(path.as_ref(), &encode_pfm(&[&n1, &n2, &n3]))
}

/// Read a binary `P5` PGM mask; non-zero samples are inside.
pub fn read_mask(path: impl AsRef<Path>) -> Result<DomainMask> {
    let path = path.as_ref();
    let bytes = read_bytes(path)?;
    let mut header = HeaderReader::new(path, &bytes);
    let magic = header.token("magic number")?;
    if magic != "P5" {
        return Err(header.malformed(format!("expected binary PGM magic 'P5', found '{magic}'")).into());
    }
    let width = header.dimension("width")?;
    let height = header.dimension("height")?;
    let maxval: u32 = header.number("maxval")?;
    let maxval_at = header.token_at;
    if maxval == 0 || maxval > 255 {
        return Err(FormatError::MalformedHeader {
            path: path.to_path_buf(),
            offset: maxval_at as u64,
            reason: format!("maxval must be in 1..=255, got {maxval}"),
        }
        .into());
    }
    let offset = header.end_of_header()?;
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| header.malformed("raster too large"))?;
    let data = payload(path, &bytes, offset, expected)?;
    if data.iter().all(|&b| b == 0) {
        return Err(FormatError::Invalid {
            path: path.to_path_buf(),
            reason: "mask must contain at least one inside pixel".into(),
        }
        .into());
    }
    DomainMask::from_fn(width, height, |u, v| data[v * width + u] != 0)
}

/// Write a mask as a binary `P5` PGM (255 inside, 0 outside).
pub fn write_mask(path: impl AsRef<Path>, mask: &DomainMask) -> Result<()> {
    let (w, h) = mask.dims();
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    out.extend(mask.inside_flags().iter().map(|&inside| if inside { 255u8 } else { 0 }));
    write_bytes(path.as_ref(), &out)
}

/// Write an 8-bit grayscale PNG preview of `z` normalised to `[0, 255]` over
/// the inside pixels (outside pixels are black). Returns the depth range
/// mapped onto the gray levels.
pub fn write_png_preview(path: impl AsRef<Path>, z: &ScalarGrid, mask: &DomainMask) -> Result<(f64, f64)> {
    let path = path.as_ref();
    crate::grid::ensure_dims(mask.dims(), z.dims())?;
    let (lo, hi) = z.range_on(mask);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let (w, h) = z.dims();
    let mut pixels = Vec::with_capacity(w * h);
    for (i, &value) in z.values().iter().enumerate() {
        let level = if mask.inside_flags()[i] && value.is_finite() {
            ((value - lo) / span * 255.0).round().clamp(0.0, 255.0) as u8
        } else {
            0
        };
        pixels.push(level);
    }
    image::save_buffer(path, &pixels, w as u32, h as u32, image::ExtendedColorType::L8).map_err(|e| {
        FormatError::Invalid {
            path: path.to_path_buf(),
            reason: format!("cannot write PNG: {e}"),
        }
    })?;
    Ok((lo, hi))
}
