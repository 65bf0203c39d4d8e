//! Regular control-point meshes.
//!
//! Grid point `(i, j)` sits at pixel `(i * grid_size, j * grid_size)` of the
//! current slice. Its motion vector points to the matching position in the
//! reference slice (backward mapping), so the deformed mesh lives in
//! reference coordinates.
//!
//! Cell `(cx, cy)` has corners TL `(cx, cy)`, TR `(cx+1, cy)`,
//! BR `(cx+1, cy+1)` and BL `(cx, cy+1)`. Triangle meshes split every cell
//! along the TL-BR diagonal into an upper `(TL, TR, BR)` and a lower
//! `(TL, BR, BL)` triangle.

mod raster;
mod transform;

pub use raster::{for_each_patch_pixel, rasterize, DenseField};
pub use transform::{affine_coeffs, bilinear_coeffs, PatchTransform, TransformKind};

use std::fmt;

use crate::error::{Error, Result};

/// Per-component bound on grid-point and block vectors.
pub const MV_CLAMP: i32 = 31;

pub const MIN_GRID_SIZE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    Triangle,
    Quadrilateral,
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Topology::Triangle => "tri",
            Topology::Quadrilateral => "quad",
        })
    }
}

/// Integer displacement in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MotionVector {
    pub dx: i32,
    pub dy: i32,
}

impl MotionVector {
    pub const ZERO: MotionVector = MotionVector { dx: 0, dy: 0 };

    pub const fn new(dx: i32, dy: i32) -> Self {
        Self { dx, dy }
    }

    pub fn l1(self) -> i32 {
        self.dx.abs() + self.dy.abs()
    }

    pub fn within_clamp(self, clamp: i32) -> bool {
        self.dx.abs() <= clamp && self.dy.abs() <= clamp
    }

    pub fn clamped(self, clamp: i32) -> Self {
        Self::new(self.dx.clamp(-clamp, clamp), self.dy.clamp(-clamp, clamp))
    }

    /// Ordering used to break ties between equally good candidates:
    /// smaller `|dx|+|dy|` first, then lexicographic `(dy, dx)`.
    pub fn tie_key(self) -> (i32, i32, i32) {
        (self.l1(), self.dy, self.dx)
    }
}

impl std::ops::Neg for MotionVector {
    type Output = MotionVector;

    fn neg(self) -> Self {
        Self::new(-self.dx, -self.dy)
    }
}

impl std::ops::Add for MotionVector {
    type Output = MotionVector;

    fn add(self, o: Self) -> Self {
        Self::new(self.dx + o.dx, self.dy + o.dy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatchPart {
    Quad,
    /// `(TL, TR, BR)`, pixels with local `x >= y`.
    Upper,
    /// `(TL, BR, BL)`, pixels with local `x < y`.
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Patch {
    pub cell_y: usize,
    pub cell_x: usize,
    pub part: PatchPart,
}

impl Patch {
    /// Grid indices of the patch vertices in counter-clockwise order
    /// (positive signed area with y pointing down).
    pub fn vertices(&self) -> Vec<(usize, usize)> {
        let (cx, cy) = (self.cell_x, self.cell_y);
        let tl = (cx, cy);
        let tr = (cx + 1, cy);
        let br = (cx + 1, cy + 1);
        let bl = (cx, cy + 1);
        match self.part {
            PatchPart::Quad => vec![tl, tr, br, bl],
            PatchPart::Upper => vec![tl, tr, br],
            PatchPart::Lower => vec![tl, br, bl],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeshMotion {
    grid_size: usize,
    points_x: usize,
    points_y: usize,
    topology: Topology,
    vectors: Vec<MotionVector>,
}

/// Number of grid points along an axis of `extent` pixels.
pub fn points_for(extent: usize, grid_size: usize) -> usize {
    extent.div_ceil(grid_size) + 1
}

/// Zero-motion regular grid covering a `width` x `height` slice.
pub fn make_regular_grid(
    width: usize,
    height: usize,
    grid_size: usize,
    topology: Topology,
) -> Result<MeshMotion> {
    if grid_size < MIN_GRID_SIZE {
        return Err(Error::parameter(format!(
            "grid size {grid_size} below minimum {MIN_GRID_SIZE}"
        )));
    }
    if width == 0 || height == 0 {
        return Err(Error::parameter("cannot lay a grid over an empty slice"));
    }
    let points_x = points_for(width, grid_size);
    let points_y = points_for(height, grid_size);
    Ok(MeshMotion {
        grid_size,
        points_x,
        points_y,
        topology,
        vectors: vec![MotionVector::ZERO; points_x * points_y],
    })
}

impl MeshMotion {
    /// Rebuilds a mesh from decoded parts (e.g. a motion sidecar).
    pub fn from_parts(
        grid_size: usize,
        points_x: usize,
        points_y: usize,
        topology: Topology,
        vectors: Vec<MotionVector>,
    ) -> Result<Self> {
        if grid_size < MIN_GRID_SIZE || points_x < 2 || points_y < 2 {
            return Err(Error::parameter(format!(
                "invalid mesh layout {points_x}x{points_y} at grid size {grid_size}"
            )));
        }
        if vectors.len() != points_x * points_y {
            return Err(Error::format(format!(
                "{} vectors for {}x{} grid points",
                vectors.len(),
                points_x,
                points_y
            )));
        }
        Ok(Self {
            grid_size,
            points_x,
            points_y,
            topology,
            vectors,
        })
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn points_x(&self) -> usize {
        self.points_x
    }

    pub fn points_y(&self) -> usize {
        self.points_y
    }

    pub fn cells_x(&self) -> usize {
        self.points_x - 1
    }

    pub fn cells_y(&self) -> usize {
        self.points_y - 1
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn vectors(&self) -> &[MotionVector] {
        &self.vectors
    }

    #[inline]
    pub fn vector(&self, i: usize, j: usize) -> MotionVector {
        self.vectors[j * self.points_x + i]
    }

    #[inline]
    pub fn set_vector(&mut self, i: usize, j: usize, v: MotionVector) {
        self.vectors[j * self.points_x + i] = v;
    }

    /// Pixel position of grid point `(i, j)` in the current slice.
    #[inline]
    pub fn point_position(&self, i: usize, j: usize) -> (i64, i64) {
        ((i * self.grid_size) as i64, (j * self.grid_size) as i64)
    }

    /// Position of grid point `(i, j)` after deformation (reference slice).
    #[inline]
    pub fn deformed_position(&self, i: usize, j: usize) -> (i64, i64) {
        let (x, y) = self.point_position(i, j);
        let v = self.vector(i, j);
        (x + v.dx as i64, y + v.dy as i64)
    }

    /// Whether this grid lays out exactly over a `width` x `height` slice.
    pub fn matches_dims(&self, width: usize, height: usize) -> bool {
        self.points_x == points_for(width, self.grid_size)
            && self.points_y == points_for(height, self.grid_size)
    }

    pub fn ensure_dims(&self, width: usize, height: usize) -> Result<()> {
        if self.matches_dims(width, height) {
            Ok(())
        } else {
            Err(Error::Sidecar(format!(
                "{}x{} grid at size {} does not cover a {}x{} slice",
                self.points_x, self.points_y, self.grid_size, width, height
            )))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.vectors.iter().all(|v| *v == MotionVector::ZERO)
    }

    /// Every vector negated; geometry and topology unchanged.
    pub fn negated(&self) -> MeshMotion {
        MeshMotion {
            vectors: self.vectors.iter().map(|&v| -v).collect(),
            ..self.clone()
        }
    }

    pub fn cell_patches(&self, cell_x: usize, cell_y: usize) -> &'static [PatchPart] {
        let _ = (cell_x, cell_y);
        match self.topology {
            Topology::Quadrilateral => &[PatchPart::Quad],
            Topology::Triangle => &[PatchPart::Upper, PatchPart::Lower],
        }
    }

    pub fn patches(&self) -> impl Iterator<Item = Patch> + '_ {
        (0..self.cells_y()).flat_map(move |cy| {
            (0..self.cells_x()).flat_map(move |cx| {
                self.cell_patches(cx, cy).iter().map(move |&part| Patch {
                    cell_x: cx,
                    cell_y: cy,
                    part,
                })
            })
        })
    }

    /// Patches having grid point `(i, j)` as a vertex.
    pub fn incident_patches(&self, i: usize, j: usize) -> Vec<Patch> {
        let mut out = Vec::with_capacity(6);
        for cy in j.saturating_sub(1)..=j.min(self.cells_y() - 1) {
            for cx in i.saturating_sub(1)..=i.min(self.cells_x() - 1) {
                for &part in self.cell_patches(cx, cy) {
                    let patch = Patch {
                        cell_x: cx,
                        cell_y: cy,
                        part,
                    };
                    if patch.vertices().contains(&(i, j)) {
                        out.push(patch);
                    }
                }
            }
        }
        out
    }

    /// Grid points sharing a cell with `(i, j)`, excluding itself.
    pub fn neighbors(&self, i: usize, j: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let xs = i.saturating_sub(1)..=(i + 1).min(self.points_x - 1);
        let ys = j.saturating_sub(1)..=(j + 1).min(self.points_y - 1);
        ys.flat_map(move |y| xs.clone().map(move |x| (x, y)))
            .filter(move |&p| p != (i, j))
    }

    /// Twice the signed area (triangles) or the minimum corner cross product
    /// (quadrilaterals) of the deformed patch. Positive means not folded.
    pub fn patch_orientation(&self, patch: &Patch) -> i64 {
        let q: Vec<(i64, i64)> = patch
            .vertices()
            .iter()
            .map(|&(i, j)| self.deformed_position(i, j))
            .collect();
        let cross = |a: (i64, i64), b: (i64, i64), c: (i64, i64)| {
            (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
        };
        if q.len() == 3 {
            cross(q[0], q[1], q[2])
        } else {
            (0..4)
                .map(|k| cross(q[k], q[(k + 1) % 4], q[(k + 2) % 4]))
                .min()
                .unwrap()
        }
    }

    pub fn patch_folded(&self, patch: &Patch) -> bool {
        self.patch_orientation(patch) <= 0
    }

    /// Whether any patch incident to `(i, j)` is folded or degenerate.
    pub fn point_folds(&self, i: usize, j: usize) -> bool {
        self.incident_patches(i, j)
            .iter()
            .any(|p| self.patch_folded(p))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Clamp {
        point: (usize, usize),
        vector: MotionVector,
    },
    Fold {
        patch: Patch,
    },
}

/// Every clamp violation and folded patch; empty iff the mesh is valid.
pub fn validate(mesh: &MeshMotion) -> Vec<Violation> {
    let mut out = Vec::new();
    for j in 0..mesh.points_y {
        for i in 0..mesh.points_x {
            let v = mesh.vector(i, j);
            if !v.within_clamp(MV_CLAMP) {
                out.push(Violation::Clamp {
                    point: (i, j),
                    vector: v,
                });
            }
        }
    }
    out.extend(
        mesh.patches()
            .filter(|p| mesh.patch_folded(p))
            .map(|patch| Violation::Fold { patch }),
    );
    out
}

pub fn negate(mesh: &MeshMotion) -> MeshMotion {
    mesh.negated()
}

/// Clamps every vector and removes fold-overs.
///
/// Points touching a folded patch are visited in raster order and their
/// vector is scaled toward zero to the largest integer candidate that
/// leaves all incident patches unfolded (zero if none does). Passes repeat
/// until the mesh is valid; if a pass changes nothing the whole mesh falls
/// back to zero motion. Returns the repaired mesh and the number of
/// vectors changed.
pub fn repair_folds(mesh: &MeshMotion) -> (MeshMotion, usize) {
    let mut out = mesh.clone();
    let mut changed = 0;
    for v in out.vectors.iter_mut() {
        let c = v.clamped(MV_CLAMP);
        if c != *v {
            *v = c;
            changed += 1;
        }
    }
    loop {
        if !out.patches().any(|p| out.patch_folded(&p)) {
            break;
        }
        let mut pass_changed = 0;
        for j in 0..out.points_y {
            for i in 0..out.points_x {
                let v = out.vector(i, j);
                if v == MotionVector::ZERO || !out.point_folds(i, j) {
                    continue;
                }
                let steps = v.dx.abs().max(v.dy.abs());
                let mut chosen = MotionVector::ZERO;
                for k in (0..steps).rev() {
                    let cand = scale_toward_zero(v, k, steps);
                    out.set_vector(i, j, cand);
                    if !out.point_folds(i, j) {
                        chosen = cand;
                        break;
                    }
                }
                out.set_vector(i, j, chosen);
                pass_changed += 1;
            }
        }
        changed += pass_changed;
        if pass_changed == 0 {
            changed += out
                .vectors
                .iter()
                .filter(|v| **v != MotionVector::ZERO)
                .count();
            out.vectors.iter_mut().for_each(|v| *v = MotionVector::ZERO);
            break;
        }
    }
    (out, changed)
}

/// `round(v * k / steps)` per component, rounding half away from zero.
fn scale_toward_zero(v: MotionVector, k: i32, steps: i32) -> MotionVector {
    let scale = |c: i32| {
        let num = c * k;
        let q = (num.abs() * 2 + steps) / (2 * steps);
        q * num.signum()
    };
    MotionVector::new(scale(v.dx), scale(v.dy))
}
