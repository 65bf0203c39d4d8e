mod common;

use meshlift::analysis::{hp_energy, psnr};
use meshlift::compensation::{
    block_field, block_predict, mesh_inverse_predict, mesh_predict, Compensator, RealSlice,
};
use meshlift::estimation::{block_estimate, estimate, BlockMotion, EstimationConfig};
use meshlift::lifting::{forward, inverse};
use meshlift::mesh::{validate, MotionVector, Topology};
use meshlift::volume::Slice;

use common::*;

fn inverse_psnr(reference: &Slice, current: &Slice, mesh: &meshlift::mesh::MeshMotion) -> f64 {
    let back = mesh_inverse_predict(current, mesh)
        .unwrap()
        .floor(12)
        .unwrap();
    psnr(reference, &back, 4095.0).unwrap()
}

#[test]
fn estimated_mesh_prediction_beats_no_motion() {
    let (reference, current) = phantom_pair(96);
    for topology in [Topology::Triangle, Topology::Quadrilateral] {
        let (mesh, _) = estimate(
            &current,
            &reference,
            &EstimationConfig::for_grid(16, topology),
        )
        .unwrap();
        let pred = mesh_predict(&reference, &mesh).unwrap();
        assert!(pred.ssd(&current) < RealSlice::from_slice(&reference).ssd(&current));
    }
}

/// Meshes estimated on the same phantom pair at both grid sizes.
#[test]
fn finer_grid_inverts_worse_for_the_same_deformation() {
    let (reference, current) = phantom_pair(128);
    for topology in [Topology::Triangle, Topology::Quadrilateral] {
        let run = |grid| {
            let cfg = EstimationConfig::for_grid(grid, topology);
            let (mesh, _) = estimate(&current, &reference, &cfg).unwrap();
            inverse_psnr(&reference, &current, &mesh)
        };
        let (c, f) = (run(16), run(8));
        assert!(f < c, "{topology}: grid 8 {f:.3} dB vs grid 16 {c:.3} dB");
    }
}

/// With exact vectors the finer grid follows the smooth deformation
/// more closely, so the approximate inverse does not degrade.
#[test]
fn true_deformation_meshes_invert_well_at_both_grids() {
    let spec = phantom_spec(128, &[1.0, 1.05]);
    let (reference, current) = phantom_pair(128);
    for topology in [Topology::Triangle, Topology::Quadrilateral] {
        for grid in [8, 16] {
            let mesh = true_mesh(&spec, grid, topology);
            assert!(validate(&mesh).is_empty());
            let none = psnr(&reference, &current, 4095.0).unwrap();
            assert!(inverse_psnr(&reference, &current, &mesh) > none + 5.0);
        }
    }
}

#[test]
fn compensation_reduces_highpass_energy() {
    let (reference, current) = phantom_pair(128);
    let none = forward(&reference, &current, &Compensator::None).unwrap();
    let blocks = block_estimate(&current, &reference, 16, 9).unwrap();
    let block = forward(&reference, &current, &Compensator::Block(blocks)).unwrap();
    let e_none = hp_energy(&none.hp);
    assert!(hp_energy(&block.hp) < e_none);
    for topology in [Topology::Triangle, Topology::Quadrilateral] {
        let (mesh, _) = estimate(
            &current,
            &reference,
            &EstimationConfig::for_grid(16, topology),
        )
        .unwrap();
        let bands = forward(&reference, &current, &Compensator::Mesh(mesh)).unwrap();
        assert!(hp_energy(&bands.hp) < e_none, "{topology}");
    }
}

/// A smooth horizontal ramp in motion: blocks jump from 0 to 5 px at one
/// column, the mesh follows the ramp.
#[test]
fn block_boundary_leaves_a_seam_the_mesh_avoids() {
    let (w, h) = (64usize, 32usize);
    let base = phantom_pair(w + 32).0;
    let reference = Slice::from_fn(w, h, 12, |x, y| base.get(x, y + 8));
    let shift = |x: usize| 5.0 * ((x as f64 - 16.0) / 32.0).clamp(0.0, 1.0);
    let current = Slice::from_fn(w, h, 12, |x, y| {
        let sx = x as f64 + shift(x);
        let (x0, f) = (sx.floor() as usize, sx - sx.floor());
        let a = reference.get(x0.min(w - 1), y) as f64;
        let b = reference.get((x0 + 1).min(w - 1), y) as f64;
        ((1.0 - f) * a + f * b).floor() as i32
    });

    let mut blocks = BlockMotion::zeros(w, h, 16);
    for by in 0..blocks.blocks_y() {
        for bx in 2..blocks.blocks_x() {
            blocks.set_vector(bx, by, MotionVector::new(5, 0));
        }
    }
    let field = block_field(&blocks, w, h).unwrap();
    assert_eq!(field.get(31, 0), (0.0, 0.0));
    assert_eq!(field.get(32, 0), (5.0, 0.0));

    let mut mesh = meshlift::mesh::make_regular_grid(w, h, 16, Topology::Quadrilateral).unwrap();
    for j in 0..mesh.points_y() {
        for i in 0..mesh.points_x() {
            mesh.set_vector(i, j, MotionVector::new(shift(i * 16).round() as i32, 0));
        }
    }
    let seam_energy = |pred: RealSlice| {
        let pred = pred.floor(12).unwrap();
        let mut e = 0i64;
        for y in 0..h {
            for x in 28..36 {
                let d = (current.get(x, y) - pred.get(x, y)) as i64;
                e += d * d;
            }
        }
        e
    };
    let e_block = seam_energy(block_predict(&reference, &blocks).unwrap());
    let e_mesh = seam_energy(mesh_predict(&reference, &mesh).unwrap());
    assert!(e_block > e_mesh, "block {e_block} vs mesh {e_mesh}");
}

#[test]
fn lifting_is_lossless_for_estimated_motion() {
    let (reference, current) = phantom_pair(64);
    let blocks = block_estimate(&current, &reference, 8, 7).unwrap();
    let mut comps = vec![Compensator::None, Compensator::Block(blocks)];
    for topology in [Topology::Triangle, Topology::Quadrilateral] {
        let (mesh, _) = estimate(
            &current,
            &reference,
            &EstimationConfig::for_grid(8, topology),
        )
        .unwrap();
        comps.push(Compensator::Mesh(mesh));
    }
    for comp in comps {
        let bands = forward(&reference, &current, &comp).unwrap();
        assert_eq!(
            inverse(&bands).unwrap(),
            (reference.clone(), current.clone())
        );
    }
}

#[test]
fn invalid_mesh_is_rejected_before_lifting() {
    let (reference, current) = phantom_pair(32);
    let mut mesh = meshlift::mesh::make_regular_grid(32, 32, 8, Topology::Triangle).unwrap();
    mesh.set_vector(1, 1, MotionVector::new(-17, 0));
    assert!(forward(&reference, &current, &Compensator::Mesh(mesh)).is_err());
}
