use super::EstimationConfig;
use crate::error::{Error, Result};
use crate::mesh::{make_regular_grid, repair_folds, MeshMotion, MotionVector, MV_CLAMP};
use crate::volume::Slice;

/// One integer vector per non-overlapping block; border blocks may be
/// partial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockMotion {
    block_size: usize,
    blocks_x: usize,
    blocks_y: usize,
    vectors: Vec<MotionVector>,
}

impl BlockMotion {
    pub fn zeros(width: usize, height: usize, block_size: usize) -> Self {
        assert!(block_size > 0);
        let blocks_x = width.div_ceil(block_size);
        let blocks_y = height.div_ceil(block_size);
        Self {
            block_size,
            blocks_x,
            blocks_y,
            vectors: vec![MotionVector::ZERO; blocks_x * blocks_y],
        }
    }

    pub fn from_parts(
        block_size: usize,
        blocks_x: usize,
        blocks_y: usize,
        vectors: Vec<MotionVector>,
    ) -> Result<Self> {
        if block_size == 0 || blocks_x == 0 || blocks_y == 0 {
            return Err(Error::parameter("empty block layout"));
        }
        if vectors.len() != blocks_x * blocks_y {
            return Err(Error::format(format!(
                "{} vectors for {}x{} blocks",
                vectors.len(),
                blocks_x,
                blocks_y
            )));
        }
        Ok(Self {
            block_size,
            blocks_x,
            blocks_y,
            vectors,
        })
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn blocks_x(&self) -> usize {
        self.blocks_x
    }

    pub fn blocks_y(&self) -> usize {
        self.blocks_y
    }

    pub fn vectors(&self) -> &[MotionVector] {
        &self.vectors
    }

    #[inline]
    pub fn vector(&self, bx: usize, by: usize) -> MotionVector {
        self.vectors[by * self.blocks_x + bx]
    }

    pub fn set_vector(&mut self, bx: usize, by: usize, v: MotionVector) {
        self.vectors[by * self.blocks_x + bx] = v;
    }

    pub fn ensure_dims(&self, width: usize, height: usize) -> Result<()> {
        if self.blocks_x == width.div_ceil(self.block_size)
            && self.blocks_y == height.div_ceil(self.block_size)
        {
            Ok(())
        } else {
            Err(Error::Sidecar(format!(
                "{}x{} blocks of {} px do not cover a {}x{} slice",
                self.blocks_x, self.blocks_y, self.block_size, width, height
            )))
        }
    }
}

/// SSD between the current-slice window starting at `(x0, y0)` and the
/// reference window displaced by `v`. Both are read with edge clamping.
fn window_ssd(
    current: &Slice,
    reference: &Slice,
    x0: isize,
    y0: isize,
    w: usize,
    h: usize,
    v: MotionVector,
) -> i64 {
    let mut sum = 0i64;
    for dy in 0..h as isize {
        for dx in 0..w as isize {
            let (x, y) = (x0 + dx, y0 + dy);
            let d = current.get_clamped(x, y) as i64
                - reference.get_clamped(x + v.dx as isize, y + v.dy as isize) as i64;
            sum += d * d;
        }
    }
    sum
}

/// Exhaustive search over `[-range, range]^2`; ties go to the smaller
/// `|dx|+|dy|`, then lexicographic `(dy, dx)`.
fn full_search(
    current: &Slice,
    reference: &Slice,
    x0: isize,
    y0: isize,
    w: usize,
    h: usize,
    range: i32,
) -> MotionVector {
    let mut best = (i64::MAX, (i32::MAX, 0, 0), MotionVector::ZERO);
    for dy in -range..=range {
        for dx in -range..=range {
            let v = MotionVector::new(dx, dy);
            let cost = window_ssd(current, reference, x0, y0, w, h, v);
            let key = v.tie_key();
            if cost < best.0 || (cost == best.0 && key < best.1) {
                best = (cost, key, v);
            }
        }
    }
    best.2
}

/// Independent full-search SSD matching of each block of the current slice.
pub fn block_estimate(
    current: &Slice,
    reference: &Slice,
    block_size: usize,
    search_range: usize,
) -> Result<BlockMotion> {
    current.ensure_same_dims(reference)?;
    if block_size == 0 {
        return Err(Error::parameter("block size must be positive"));
    }
    if search_range > MV_CLAMP as usize {
        return Err(Error::parameter(format!(
            "search range {search_range} exceeds vector clamp {MV_CLAMP}"
        )));
    }
    let (width, height) = current.dims();
    let mut blocks = BlockMotion::zeros(width, height, block_size);
    for by in 0..blocks.blocks_y {
        for bx in 0..blocks.blocks_x {
            let x0 = bx * block_size;
            let y0 = by * block_size;
            let w = block_size.min(width - x0);
            let h = block_size.min(height - y0);
            let v = full_search(
                current,
                reference,
                x0 as isize,
                y0 as isize,
                w,
                h,
                search_range as i32,
            );
            blocks.set_vector(bx, by, v);
        }
    }
    Ok(blocks)
}

/// Initial grid-point vectors from blocks of side `grid_size` centered on
/// each grid point, followed by fold repair.
pub fn coarse_estimate(
    current: &Slice,
    reference: &Slice,
    config: &EstimationConfig,
) -> Result<MeshMotion> {
    config.validate()?;
    current.ensure_same_dims(reference)?;
    let (width, height) = current.dims();
    let mut mesh = make_regular_grid(width, height, config.grid_size, config.topology)?;
    let g = config.grid_size;
    let half = (g / 2) as isize;
    for j in 0..mesh.points_y() {
        for i in 0..mesh.points_x() {
            let (px, py) = mesh.point_position(i, j);
            let v = full_search(
                current,
                reference,
                px as isize - half,
                py as isize - half,
                g,
                g,
                config.search_range as i32,
            );
            mesh.set_vector(i, j, v);
        }
    }
    let (repaired, changed) = repair_folds(&mesh);
    if changed > 0 {
        log::debug!("coarse estimate: fold repair changed {changed} vectors");
    }
    Ok(repaired)
}
