//! Per-patch coordinate mappings from the current to the reference slice.
//!
//! Affine (triangles):
//!   `m = a1 x + a2 y + a3`, `n = a4 x + a5 y + a6`
//!
//! Bilinear (quadrilaterals):
//!   `m = a1 xy + a2 x + a3 y + a4`, `n = a5 xy + a6 x + a7 y + a8`

use super::{MeshMotion, Patch, PatchPart};
use crate::error::{Error, Result};

pub type Point = (f64, f64);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    Affine,
    Bilinear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PatchTransform {
    Affine([f64; 6]),
    Bilinear([f64; 8]),
}

impl PatchTransform {
    pub fn kind(&self) -> TransformKind {
        match self {
            PatchTransform::Affine(_) => TransformKind::Affine,
            PatchTransform::Bilinear(_) => TransformKind::Bilinear,
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        match self {
            PatchTransform::Affine(a) => a,
            PatchTransform::Bilinear(a) => a,
        }
    }

    /// Reference position `(m(x, y), n(x, y))`.
    #[inline]
    pub fn apply(&self, x: f64, y: f64) -> Point {
        match self {
            PatchTransform::Affine(a) => (a[0] * x + a[1] * y + a[2], a[3] * x + a[4] * y + a[5]),
            PatchTransform::Bilinear(a) => (
                a[0] * x * y + a[1] * x + a[2] * y + a[3],
                a[4] * x * y + a[5] * x + a[6] * y + a[7],
            ),
        }
    }

    /// Displacement `(m - x, n - y)`.
    pub fn displacement(&self, x: f64, y: f64) -> Point {
        let (m, n) = self.apply(x, y);
        (m - x, n - y)
    }

    /// Transform of one mesh patch: grid positions to deformed positions.
    pub fn for_patch(mesh: &MeshMotion, patch: &Patch) -> Result<Self> {
        let verts = patch.vertices();
        let src = |k: usize| {
            let (x, y) = mesh.point_position(verts[k].0, verts[k].1);
            (x as f64, y as f64)
        };
        let dst = |k: usize| {
            let (x, y) = mesh.deformed_position(verts[k].0, verts[k].1);
            (x as f64, y as f64)
        };
        match patch.part {
            PatchPart::Quad => bilinear_coeffs(
                [src(0), src(1), src(2), src(3)],
                [dst(0), dst(1), dst(2), dst(3)],
            ),
            PatchPart::Upper | PatchPart::Lower => {
                affine_coeffs([src(0), src(1), src(2)], [dst(0), dst(1), dst(2)])
            }
        }
    }
}

/// Affine map sending each `src[k]` to `dst[k]` (Cramer's rule).
pub fn affine_coeffs(src: [Point; 3], dst: [Point; 3]) -> Result<PatchTransform> {
    let [(x0, y0), (x1, y1), (x2, y2)] = src;
    let det = x0 * (y1 - y2) - y0 * (x1 - x2) + (x1 * y2 - x2 * y1);
    let scale = (x1 - x0)
        .abs()
        .max((y1 - y0).abs())
        .max((x2 - x0).abs())
        .max((y2 - y0).abs());
    if det.abs() <= 1e-12 * scale * scale || scale == 0.0 {
        return Err(Error::geometry("degenerate source triangle"));
    }
    // Rows of the inverse of [[x0 y0 1] [x1 y1 1] [x2 y2 1]], times 1/det.
    let solve = |r0: f64, r1: f64, r2: f64| {
        let a = (r0 * (y1 - y2) - y0 * (r1 - r2) + (r1 * y2 - r2 * y1)) / det;
        let b = (x0 * (r1 - r2) - r0 * (x1 - x2) + (x1 * r2 - x2 * r1)) / det;
        let c =
            (x0 * (y1 * r2 - y2 * r1) - y0 * (x1 * r2 - x2 * r1) + r0 * (x1 * y2 - x2 * y1)) / det;
        (a, b, c)
    };
    let (a1, a2, a3) = solve(dst[0].0, dst[1].0, dst[2].0);
    let (a4, a5, a6) = solve(dst[0].1, dst[1].1, dst[2].1);
    Ok(PatchTransform::Affine([a1, a2, a3, a4, a5, a6]))
}

/// Bilinear map sending the corners of an axis-aligned cell to `dst`.
///
/// Corners are ordered TL, TR, BR, BL.
pub fn bilinear_coeffs(src: [Point; 4], dst: [Point; 4]) -> Result<PatchTransform> {
    for a in 0..4 {
        for b in a + 1..4 {
            if src[a] == src[b] {
                return Err(Error::geometry("repeated source vertex"));
            }
        }
    }
    let (x0, y0) = src[0];
    let w = src[1].0 - x0;
    let h = src[3].1 - y0;
    let aligned = src[1].1 == y0 && src[3].0 == x0 && src[2] == (x0 + w, y0 + h);
    if !aligned || w == 0.0 || h == 0.0 {
        return Err(Error::geometry(
            "source quadrilateral is not an axis-aligned cell",
        ));
    }
    // f = d0 + A u + B v + C u v with u = (x - x0)/w, v = (y - y0)/h.
    let expand = |d0: f64, d1: f64, d2: f64, d3: f64| {
        let a = d1 - d0;
        let b = d3 - d0;
        let c = d0 - d1 + d2 - d3;
        let wh = w * h;
        [
            c / wh,
            a / w - c * y0 / wh,
            b / h - c * x0 / wh,
            d0 - a * x0 / w - b * y0 / h + c * x0 * y0 / wh,
        ]
    };
    let m = expand(dst[0].0, dst[1].0, dst[2].0, dst[3].0);
    let n = expand(dst[0].1, dst[1].1, dst[2].1, dst[3].1);
    Ok(PatchTransform::Bilinear([
        m[0], m[1], m[2], m[3], n[0], n[1], n[2], n[3],
    ]))
}
