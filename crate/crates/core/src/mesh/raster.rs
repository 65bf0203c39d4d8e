use super::{validate, MeshMotion, Patch, PatchPart};
use crate::error::{Error, Result};

/// Per-pixel displacement: pixel `(x, y)` of the current slice maps to
/// `(x + m, y + n)` in the reference slice.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseField {
    width: usize,
    height: usize,
    m: Vec<f64>,
    n: Vec<f64>,
}

impl DenseField {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self::constant(width, height, 0.0, 0.0)
    }

    pub fn constant(width: usize, height: usize, m: f64, n: f64) -> Self {
        Self {
            width,
            height,
            m: vec![m; width * height],
            n: vec![n; width * height],
        }
    }

    pub fn from_parts(width: usize, height: usize, m: Vec<f64>, n: Vec<f64>) -> Result<Self> {
        if m.len() != width * height || n.len() != width * height {
            return Err(Error::format("field components do not match dimensions"));
        }
        Ok(Self {
            width,
            height,
            m,
            n,
        })
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

    pub fn m(&self) -> &[f64] {
        &self.m
    }

    pub fn n(&self) -> &[f64] {
        &self.n
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> (f64, f64) {
        let k = y * self.width + x;
        (self.m[k], self.n[k])
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, d: (f64, f64)) {
        let k = y * self.width + x;
        self.m[k] = d.0;
        self.n[k] = d.1;
    }

    pub fn negated(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            m: self.m.iter().map(|v| -v).collect(),
            n: self.n.iter().map(|v| -v).collect(),
        }
    }
}

/// Visits every image pixel owned by `patch` with its interpolated
/// displacement `(m, n)`.
///
/// Quadrilaterals interpolate their four corner vectors bilinearly,
/// triangles their three corner vectors barycentrically. Interpolation is
/// written as corner value plus weighted differences so that constant
/// vector fields come out exact.
pub fn for_each_patch_pixel(
    mesh: &MeshMotion,
    patch: &Patch,
    width: usize,
    height: usize,
    mut f: impl FnMut(usize, usize, f64, f64),
) {
    let g = mesh.grid_size();
    let (cx, cy) = (patch.cell_x, patch.cell_y);
    let x0 = cx * g;
    let y0 = cy * g;
    if x0 >= width || y0 >= height {
        return;
    }
    let x_end = (x0 + g).min(width);
    let y_end = (y0 + g).min(height);
    let corner = |i: usize, j: usize| {
        let v = mesh.vector(i, j);
        (v.dx as f64, v.dy as f64)
    };
    let tl = corner(cx, cy);
    let tr = corner(cx + 1, cy);
    let br = corner(cx + 1, cy + 1);
    let bl = corner(cx, cy + 1);
    let inv_g = 1.0 / g as f64;
    let sub = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0, a.1 - b.1);

    match patch.part {
        PatchPart::Quad => {
            let du = sub(tr, tl);
            let dv = sub(bl, tl);
            let duv = (tl.0 - tr.0 + br.0 - bl.0, tl.1 - tr.1 + br.1 - bl.1);
            for y in y0..y_end {
                let v = (y - y0) as f64 * inv_g;
                for x in x0..x_end {
                    let u = (x - x0) as f64 * inv_g;
                    let uv = u * v;
                    f(
                        x,
                        y,
                        tl.0 + u * du.0 + v * dv.0 + uv * duv.0,
                        tl.1 + u * du.1 + v * dv.1 + uv * duv.1,
                    );
                }
            }
        }
        PatchPart::Upper => {
            let du = sub(tr, tl);
            let dv = sub(br, tr);
            for y in y0..y_end {
                let ly = y - y0;
                let v = ly as f64 * inv_g;
                for x in (x0 + ly).min(x_end)..x_end {
                    let u = (x - x0) as f64 * inv_g;
                    f(x, y, tl.0 + u * du.0 + v * dv.0, tl.1 + u * du.1 + v * dv.1);
                }
            }
        }
        PatchPart::Lower => {
            let du = sub(br, bl);
            let dv = sub(bl, tl);
            for y in y0..y_end {
                let ly = y - y0;
                let v = ly as f64 * inv_g;
                for x in x0..(x0 + ly).min(x_end) {
                    let u = (x - x0) as f64 * inv_g;
                    f(x, y, tl.0 + u * du.0 + v * dv.0, tl.1 + u * du.1 + v * dv.1);
                }
            }
        }
    }
}

/// Dense displacement field of a valid mesh over a `width` x `height` slice.
pub fn rasterize(mesh: &MeshMotion, width: usize, height: usize) -> Result<DenseField> {
    mesh.ensure_dims(width, height)?;
    let violations = validate(mesh);
    if !violations.is_empty() {
        return Err(Error::geometry(format!(
            "cannot rasterize invalid mesh ({} violations, first {:?})",
            violations.len(),
            violations[0]
        )));
    }
    Ok(rasterize_unchecked(mesh, width, height))
}

pub(crate) fn rasterize_unchecked(mesh: &MeshMotion, width: usize, height: usize) -> DenseField {
    let mut field = DenseField::zeros(width, height);
    for patch in mesh.patches() {
        for_each_patch_pixel(mesh, &patch, width, height, |x, y, m, n| {
            field.set(x, y, (m, n))
        });
    }
    field
}
