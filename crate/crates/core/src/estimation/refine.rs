use rayon::prelude::*;

use super::{ConvergenceTrace, EstimationConfig, IterationRecord, Schedule};
use crate::analysis::psnr;
use crate::compensation::{mesh_inverse_predict, mesh_predict, sample_bilinear};
use crate::error::{Error, Result};
use crate::mesh::{for_each_patch_pixel, validate, MeshMotion, MotionVector, Patch, MV_CLAMP};
use crate::volume::Slice;

const OFFSETS: [(i32, i32); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// A candidate must beat the current error by this relative margin, so that
/// accepted moves lower the global error despite summation-order rounding.
const RELATIVE_MARGIN: f64 = 1e-9;

/// Squared difference between `current` and the mesh-warped `reference`
/// over the image pixels of `patches`.
pub fn patch_error(
    current: &Slice,
    reference: &Slice,
    mesh: &MeshMotion,
    patches: &[Patch],
) -> f64 {
    let (w, h) = current.dims();
    let mut sum = 0.0;
    for patch in patches {
        for_each_patch_pixel(mesh, patch, w, h, |x, y, m, n| {
            let pred = sample_bilinear(reference, x as f64 + m, y as f64 + n);
            let d = current.get(x, y) as f64 - pred;
            sum += d * d;
        });
    }
    sum
}

/// [`patch_error`] over every patch of the mesh.
pub fn global_error(current: &Slice, reference: &Slice, mesh: &MeshMotion) -> f64 {
    let patches: Vec<Patch> = mesh.patches().collect();
    patch_error(current, reference, mesh, &patches)
}

/// Best one-pixel move of grid point `(i, j)`, if it strictly lowers the
/// error over the incident patches without leaving the clamp or folding.
fn best_move(
    current: &Slice,
    reference: &Slice,
    mesh: &mut MeshMotion,
    i: usize,
    j: usize,
) -> Option<MotionVector> {
    let patches = mesh.incident_patches(i, j);
    let original = mesh.vector(i, j);
    let base = patch_error(current, reference, mesh, &patches);
    let mut best: Option<(f64, (i32, i32, i32), MotionVector)> = None;
    for (ox, oy) in OFFSETS {
        let cand = original + MotionVector::new(ox, oy);
        if !cand.within_clamp(MV_CLAMP) {
            continue;
        }
        mesh.set_vector(i, j, cand);
        if patches.iter().any(|p| mesh.patch_folded(p)) {
            continue;
        }
        let err = patch_error(current, reference, mesh, &patches);
        let key = cand.tie_key();
        let better = match best {
            None => true,
            Some((e, k, _)) => err < e || (err == e && key < k),
        };
        if better {
            best = Some((err, key, cand));
        }
    }
    mesh.set_vector(i, j, original);
    match best {
        Some((err, _, cand)) if err < base - RELATIVE_MARGIN * base.max(1.0) => Some(cand),
        _ => None,
    }
}

fn snapshot_record(
    current: &Slice,
    reference: &Slice,
    mesh: &MeshMotion,
    iteration: usize,
    active_points: usize,
    updated_points: usize,
) -> Result<IterationRecord> {
    let bit_depth = current.bit_depth();
    let peak = current.max_value() as f64;
    let comp = mesh_predict(reference, mesh)?.floor(bit_depth)?;
    let inv = mesh_inverse_predict(current, mesh)?.floor(bit_depth)?;
    Ok(IterationRecord {
        iteration,
        active_points,
        updated_points,
        global_ssd: global_error(current, reference, mesh),
        comp_psnr_db: psnr(current, &comp, peak)?,
        inv_psnr_db: psnr(reference, &inv, peak)?,
    })
}

/// Iterative one-pixel refinement of grid-point vectors.
///
/// All points start active. In each iteration every active point tries its
/// eight one-pixel neighbours and adopts the best one if it strictly lowers
/// the error over its incident patches. Points updated in an iteration,
/// together with their neighbours, form the next active set. Stops when an
/// iteration updates nothing or after `max_iterations`.
pub fn refine(
    current: &Slice,
    reference: &Slice,
    mesh: &MeshMotion,
    config: &EstimationConfig,
) -> Result<(MeshMotion, ConvergenceTrace)> {
    current.ensure_same_dims(reference)?;
    mesh.ensure_dims(current.width(), current.height())?;
    if !validate(mesh).is_empty() {
        return Err(Error::geometry("refinement needs a valid starting mesh"));
    }
    let (px, py) = (mesh.points_x(), mesh.points_y());
    let mut mesh = mesh.clone();
    let mut active = vec![true; px * py];
    let mut trace = ConvergenceTrace {
        initial_ssd: global_error(current, reference, &mesh),
        ..Default::default()
    };

    for iteration in 1..=config.max_iterations {
        let active_points = active.iter().filter(|&&a| a).count();
        let mut updated = vec![false; px * py];
        match config.schedule {
            Schedule::Sequential => {
                for j in 0..py {
                    for i in 0..px {
                        if !active[j * px + i] {
                            continue;
                        }
                        if let Some(v) = best_move(current, reference, &mut mesh, i, j) {
                            mesh.set_vector(i, j, v);
                            updated[j * px + i] = true;
                        }
                    }
                }
            }
            Schedule::IndependentSets => {
                for (ci, cj) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                    let points: Vec<(usize, usize)> = (cj..py)
                        .step_by(2)
                        .flat_map(|j| (ci..px).step_by(2).map(move |i| (i, j)))
                        .filter(|&(i, j)| active[j * px + i])
                        .collect();
                    let snapshot = &mesh;
                    let moves: Vec<Option<MotionVector>> = points
                        .par_iter()
                        .map(|&(i, j)| {
                            let mut local = snapshot.clone();
                            best_move(current, reference, &mut local, i, j)
                        })
                        .collect();
                    for (&(i, j), mv) in points.iter().zip(moves) {
                        if let Some(v) = mv {
                            mesh.set_vector(i, j, v);
                            updated[j * px + i] = true;
                        }
                    }
                }
            }
        }

        let updated_points = updated.iter().filter(|&&u| u).count();
        trace.records.push(snapshot_record(
            current,
            reference,
            &mesh,
            iteration,
            active_points,
            updated_points,
        )?);
        if updated_points == 0 {
            trace.converged = true;
            break;
        }
        active.iter_mut().for_each(|a| *a = false);
        for j in 0..py {
            for i in 0..px {
                if updated[j * px + i] {
                    active[j * px + i] = true;
                    for (ni, nj) in mesh.neighbors(i, j) {
                        active[nj * px + ni] = true;
                    }
                }
            }
        }
    }
    Ok((mesh, trace))
}
