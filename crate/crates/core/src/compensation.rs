//! Warping operators for the prediction and update steps.
//!
//! All warps are backward (gather) warps: output pixel `(x, y)` is the
//! bilinear sample of the input at `(x + m, y + n)`, with the sampling
//! position clamped to the image rectangle. Results stay real-valued;
//! rounding belongs to the lifting steps.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimation::BlockMotion;
use crate::mesh::{self, rasterize, DenseField, MeshMotion};
use crate::volume::Slice;

/// Real-valued image produced by a warp.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSlice {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl RealSlice {
    pub fn from_slice(s: &Slice) -> Self {
        Self {
            width: s.width(),
            height: s.height(),
            data: s.samples().iter().map(|&v| v as f64).collect(),
        }
    }

    pub fn from_parts(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::format("sample count does not match dimensions"));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    /// Per-pixel floor, i.e. the largest integer not above each value.
    pub fn floor(&self, bit_depth: u8) -> Result<Slice> {
        let samples = self.data.iter().map(|v| v.floor() as i32).collect();
        Slice::new(self.width, self.height, samples, bit_depth)
    }

    /// Sum of squared differences against an integer slice.
    pub fn ssd(&self, other: &Slice) -> f64 {
        self.data
            .iter()
            .zip(other.samples())
            .map(|(&a, &b)| {
                let d = a - b as f64;
                d * d
            })
            .sum()
    }
}

/// Bilinear sample of `s` at `(sx, sy)`, clamped to the image rectangle.
#[inline]
pub fn sample_bilinear(s: &Slice, sx: f64, sy: f64) -> f64 {
    let (w, h) = s.dims();
    let sx = sx.clamp(0.0, (w - 1) as f64);
    let sy = sy.clamp(0.0, (h - 1) as f64);
    let x0 = sx.floor() as usize;
    let y0 = sy.floor() as usize;
    let fx = sx - x0 as f64;
    let fy = sy - y0 as f64;
    let x1 = if fx > 0.0 { x0 + 1 } else { x0 };
    let y1 = if fy > 0.0 { y0 + 1 } else { y0 };
    let a = s.get(x0, y0) as f64;
    let b = s.get(x1, y0) as f64;
    let c = s.get(x0, y1) as f64;
    let d = s.get(x1, y1) as f64;
    let top = a + fx * (b - a);
    let bottom = c + fx * (d - c);
    top + fy * (bottom - top)
}

/// Samples `reference` through `field`.
pub fn warp(reference: &Slice, field: &DenseField) -> Result<RealSlice> {
    if reference.dims() != field.dims() {
        return Err(Error::Dimension {
            expected: reference.dims(),
            actual: field.dims(),
        });
    }
    let (w, h) = reference.dims();
    let mut data = vec![0.0; w * h];
    data.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, out) in row.iter_mut().enumerate() {
            let (m, n) = field.get(x, y);
            *out = sample_bilinear(reference, x as f64 + m, y as f64 + n);
        }
    });
    Ok(RealSlice {
        width: w,
        height: h,
        data,
    })
}

/// Prediction of the current slice from `reference` through a mesh.
pub fn mesh_predict(reference: &Slice, mesh: &MeshMotion) -> Result<RealSlice> {
    let field = rasterize(mesh, reference.width(), reference.height())?;
    warp(reference, &field)
}

/// Approximate inverse of a mesh: the negated grid-point vectors, with
/// fold-overs repaired. Returns the mesh and how many vectors the repair
/// changed.
pub fn inverse_mesh(mesh: &MeshMotion) -> (MeshMotion, usize) {
    let negated = mesh.negated();
    if mesh::validate(&negated).is_empty() {
        (negated, 0)
    } else {
        mesh::repair_folds(&negated)
    }
}

/// Approximate inverse warp used by the update step.
pub fn mesh_inverse_predict(input: &Slice, mesh: &MeshMotion) -> Result<RealSlice> {
    let (inverse, repaired) = inverse_mesh(mesh);
    if repaired > 0 {
        log::warn!("negated mesh folds over; {repaired} vectors scaled back");
    }
    let field = rasterize(&inverse, input.width(), input.height())?;
    warp(input, &field)
}

/// Piecewise-constant field of a block layout.
pub fn block_field(blocks: &BlockMotion, width: usize, height: usize) -> Result<DenseField> {
    blocks.ensure_dims(width, height)?;
    let bs = blocks.block_size();
    let mut field = DenseField::zeros(width, height);
    for y in 0..height {
        for x in 0..width {
            let v = blocks.vector(x / bs, y / bs);
            field.set(x, y, (v.dx as f64, v.dy as f64));
        }
    }
    Ok(field)
}

/// Dense, hole-free approximate inverse of a block layout.
///
/// Each block has an anchor at its nominal center moved by its vector,
/// i.e. where the block lands in the reference slice. Every output pixel
/// takes the negated vector of the nearest anchor (Euclidean distance,
/// ties to the smaller block index).
pub fn block_inverse_field(
    blocks: &BlockMotion,
    width: usize,
    height: usize,
) -> Result<DenseField> {
    blocks.ensure_dims(width, height)?;
    let bs = blocks.block_size();
    let (bx_n, by_n) = (blocks.blocks_x(), blocks.blocks_y());
    let anchors: Vec<(f64, f64)> = (0..by_n)
        .flat_map(|by| (0..bx_n).map(move |bx| (bx, by)))
        .map(|(bx, by)| {
            let v = blocks.vector(bx, by);
            let half = (bs as f64 - 1.0) / 2.0;
            (
                (bx * bs) as f64 + half + v.dx as f64,
                (by * bs) as f64 + half + v.dy as f64,
            )
        })
        .collect();
    let max_mv = blocks
        .vectors()
        .iter()
        .map(|v| v.dx.abs().max(v.dy.abs()))
        .max()
        .unwrap_or(0) as usize;
    // Blocks further than this (Chebyshev, in blocks) from the pixel's own
    // block cannot hold the nearest anchor.
    let radius = 3 + (3 * max_mv).div_ceil(bs);
    let mut field = DenseField::zeros(width, height);
    for y in 0..height {
        let by0 = y / bs;
        for x in 0..width {
            let bx0 = x / bs;
            let (px, py) = (x as f64, y as f64);
            let mut best = (f64::INFINITY, usize::MAX);
            for by in by0.saturating_sub(radius)..=(by0 + radius).min(by_n - 1) {
                for bx in bx0.saturating_sub(radius)..=(bx0 + radius).min(bx_n - 1) {
                    let k = by * bx_n + bx;
                    let (ax, ay) = anchors[k];
                    let d = (ax - px) * (ax - px) + (ay - py) * (ay - py);
                    if d < best.0 || (d == best.0 && k < best.1) {
                        best = (d, k);
                    }
                }
            }
            let v = blocks.vectors()[best.1];
            field.set(x, y, (-v.dx as f64, -v.dy as f64));
        }
    }
    Ok(field)
}

pub fn block_predict(reference: &Slice, blocks: &BlockMotion) -> Result<RealSlice> {
    let field = block_field(blocks, reference.width(), reference.height())?;
    warp(reference, &field)
}

pub fn block_inverse_predict(input: &Slice, blocks: &BlockMotion) -> Result<RealSlice> {
    let field = block_inverse_field(blocks, input.width(), input.height())?;
    warp(input, &field)
}

/// Motion description shared by the encoder and decoder of one pair.
#[derive(Debug, Clone, PartialEq)]
pub enum Compensator {
    None,
    Block(BlockMotion),
    Mesh(MeshMotion),
}

impl Compensator {
    /// Checks that the compensator can be applied to `width` x `height` slices.
    pub fn check(&self, width: usize, height: usize) -> Result<()> {
        match self {
            Compensator::None => Ok(()),
            Compensator::Block(b) => b.ensure_dims(width, height),
            Compensator::Mesh(m) => {
                m.ensure_dims(width, height)?;
                let violations = mesh::validate(m);
                if violations.is_empty() {
                    Ok(())
                } else {
                    Err(Error::geometry(format!(
                        "mesh has {} violations",
                        violations.len()
                    )))
                }
            }
        }
    }

    /// Warp from the even (reference) slice toward the odd slice.
    pub fn predict(&self, reference: &Slice) -> Result<RealSlice> {
        match self {
            Compensator::None => Ok(RealSlice::from_slice(reference)),
            Compensator::Block(b) => block_predict(reference, b),
            Compensator::Mesh(m) => mesh_predict(reference, m),
        }
    }

    /// Approximate warp from the odd slice back toward the even slice.
    pub fn inverse_predict(&self, input: &Slice) -> Result<RealSlice> {
        match self {
            Compensator::None => Ok(RealSlice::from_slice(input)),
            Compensator::Block(b) => block_inverse_predict(input, b),
            Compensator::Mesh(m) => mesh_inverse_predict(input, m),
        }
    }
}
