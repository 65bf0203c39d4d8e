#![allow(dead_code)]

use meshlift::compensation::Compensator;
use meshlift::estimation::BlockMotion;
use meshlift::mesh::{make_regular_grid, repair_folds, MeshMotion, MotionVector, Topology};
use meshlift::rng::XorShift64Star;
use meshlift::volume::{generate_phantom, PhantomSpec, Slice, TemporalSequence};

/// Radially scaling phantom used by the ordering checks.
pub fn phantom_spec(size: usize, scales: &[f64]) -> PhantomSpec {
    PhantomSpec {
        width: size,
        height: size,
        time_steps: scales.len(),
        scale_factors: scales.to_vec(),
        blob_count: 24,
        noise_amplitude: 40.0,
        seed: 1,
    }
}

/// Reference slice at scale 1.0 and current slice at 1.05.
pub fn phantom_pair(size: usize) -> (Slice, Slice) {
    let seq = phantom_sequence(size, &[1.0, 1.05]);
    let s = seq.slices();
    (s[0].clone(), s[1].clone())
}

pub fn phantom_sequence(size: usize, scales: &[f64]) -> TemporalSequence {
    generate_phantom(&phantom_spec(size, scales)).expect("valid phantom")
}

pub fn random_slice(rng: &mut XorShift64Star, w: usize, h: usize, bit_depth: u8) -> Slice {
    let max = (1i32 << bit_depth) - 1;
    Slice::from_fn(w, h, bit_depth, |_, _| rng.range_i32(0, max))
}

/// Random vectors within `amplitude`, then repaired so the mesh is valid.
pub fn random_mesh(
    rng: &mut XorShift64Star,
    w: usize,
    h: usize,
    grid: usize,
    topology: Topology,
    amplitude: i32,
) -> MeshMotion {
    let mut mesh = make_regular_grid(w, h, grid, topology).unwrap();
    for j in 0..mesh.points_y() {
        for i in 0..mesh.points_x() {
            let v = MotionVector::new(
                rng.range_i32(-amplitude, amplitude),
                rng.range_i32(-amplitude, amplitude),
            );
            mesh.set_vector(i, j, v);
        }
    }
    repair_folds(&mesh).0
}

pub fn random_blocks(
    rng: &mut XorShift64Star,
    w: usize,
    h: usize,
    block_size: usize,
    amplitude: i32,
) -> BlockMotion {
    let mut blocks = BlockMotion::zeros(w, h, block_size);
    for by in 0..blocks.blocks_y() {
        for bx in 0..blocks.blocks_x() {
            let v = MotionVector::new(
                rng.range_i32(-amplitude, amplitude),
                rng.range_i32(-amplitude, amplitude),
            );
            blocks.set_vector(bx, by, v);
        }
    }
    blocks
}

/// Any of the four compensator kinds at grid 8 or 16.
pub fn random_compensator(rng: &mut XorShift64Star, w: usize, h: usize) -> Compensator {
    let grid = if rng.range_i32(0, 1) == 0 { 8 } else { 16 };
    match rng.range_i32(0, 3) {
        0 => Compensator::None,
        1 => Compensator::Block(random_blocks(rng, w, h, grid, 12)),
        2 => Compensator::Mesh(random_mesh(rng, w, h, grid, Topology::Triangle, 12)),
        _ => Compensator::Mesh(random_mesh(rng, w, h, grid, Topology::Quadrilateral, 12)),
    }
}

/// Dense Gaussian elimination with partial pivoting.
pub fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col].clone();
            for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// `[a1..a6]` with `m = a1 x + a2 y + a3`, `n = a4 x + a5 y + a6`.
pub fn affine_oracle(src: [(f64, f64); 3], dst: [(f64, f64); 3]) -> [f64; 6] {
    let rows: Vec<Vec<f64>> = src.iter().map(|&(x, y)| vec![x, y, 1.0]).collect();
    let m = solve_linear(rows.clone(), dst.iter().map(|d| d.0).collect());
    let n = solve_linear(rows, dst.iter().map(|d| d.1).collect());
    [m[0], m[1], m[2], n[0], n[1], n[2]]
}

/// `[a1..a8]` with `m = a1 xy + a2 x + a3 y + a4`, `n` likewise.
pub fn bilinear_oracle(src: [(f64, f64); 4], dst: [(f64, f64); 4]) -> [f64; 8] {
    let rows: Vec<Vec<f64>> = src.iter().map(|&(x, y)| vec![x * y, x, y, 1.0]).collect();
    let m = solve_linear(rows.clone(), dst.iter().map(|d| d.0).collect());
    let n = solve_linear(rows, dst.iter().map(|d| d.1).collect());
    [m[0], m[1], m[2], m[3], n[0], n[1], n[2], n[3]]
}

/// `(reference, current)` crops of one phantom slice, with
/// `current(x, y) = reference(x + dx, y + dy)`, so the backward vector of
/// every pixel is `(dx, dy)`.
pub fn translated_pair(size: usize, dx: i32, dy: i32) -> (Slice, Slice) {
    let margin = 16;
    let base = phantom_sequence(size + 2 * margin, &[1.0, 1.0]).slices()[0].clone();
    let crop = |ox: i32, oy: i32| {
        Slice::from_fn(size, size, 12, |x, y| {
            base.get(
                (x as i32 + margin as i32 + ox) as usize,
                (y as i32 + margin as i32 + oy) as usize,
            )
        })
    };
    (crop(0, 0), crop(dx, dy))
}

/// Squared error of a bilinear, edge-clamped gather along `field`.
pub fn warp_ssd_oracle(
    current: &Slice,
    reference: &Slice,
    field: &meshlift::mesh::DenseField,
) -> f64 {
    let (w, h) = current.dims();
    let px = |x: f64, y: f64| {
        let x = x.clamp(0.0, (w - 1) as f64);
        let y = y.clamp(0.0, (h - 1) as f64);
        let (x0, y0) = (x.floor() as usize, y.floor() as usize);
        let (x1, y1) = ((x0 + 1).min(w - 1), (y0 + 1).min(h - 1));
        let (fx, fy) = (x - x0 as f64, y - y0 as f64);
        let r = |x, y| reference.get(x, y) as f64;
        (1.0 - fy) * ((1.0 - fx) * r(x0, y0) + fx * r(x1, y0))
            + fy * ((1.0 - fx) * r(x0, y1) + fx * r(x1, y1))
    };
    let mut sum = 0.0;
    for y in 0..h {
        for x in 0..w {
            let (m, n) = field.get(x, y);
            let d = current.get(x, y) as f64 - px(x as f64 + m, y as f64 + n);
            sum += d * d;
        }
    }
    sum
}

/// Mesh whose grid points carry the phantom's true backward displacement,
/// rounded to whole pixels.
pub fn true_mesh(spec: &PhantomSpec, grid: usize, topology: Topology) -> MeshMotion {
    let mut mesh = make_regular_grid(spec.width, spec.height, grid, topology).unwrap();
    for j in 0..mesh.points_y() {
        for i in 0..mesh.points_x() {
            let (m, n) = spec.true_displacement(0, 1, (i * grid) as f64, (j * grid) as f64);
            mesh.set_vector(i, j, MotionVector::new(m.round() as i32, n.round() as i32));
        }
    }
    mesh
}
