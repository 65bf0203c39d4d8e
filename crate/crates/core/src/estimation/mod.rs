//! Grid-point motion estimation and the block-matching baseline.
//!
//! Mesh motion is estimated in two stages: an optional block search
//! centered on every grid point gives initial vectors, then an iterative
//! one-pixel refinement moves individual grid points while it keeps
//! lowering the squared error over their incident patches.

mod block;
mod refine;

pub use block::{block_estimate, coarse_estimate, BlockMotion};
pub use refine::{global_error, patch_error, refine};

use crate::error::{Error, Result};
use crate::mesh::{make_regular_grid, MeshMotion, Topology, MIN_GRID_SIZE, MV_CLAMP};
use crate::volume::Slice;

pub const DEFAULT_ITERATIONS: usize = 15;

/// Order in which active grid points are refined within an iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    /// Raster order, each point sees all earlier updates.
    #[default]
    Sequential,
    /// Four colour classes by `(i % 2, j % 2)`, processed in the order
    /// (0,0), (1,0), (0,1), (1,1). Points of one class share no patch and
    /// are evaluated concurrently against the same snapshot.
    IndependentSets,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EstimationConfig {
    pub grid_size: usize,
    pub search_range: usize,
    pub max_iterations: usize,
    pub use_coarse: bool,
    pub topology: Topology,
    pub schedule: Schedule,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        Self::for_grid(16, Topology::Quadrilateral)
    }
}

impl EstimationConfig {
    /// Grid 8 searches +-7 px, larger grids +-9 px; 15 iterations with
    /// coarse initialisation.
    pub fn for_grid(grid_size: usize, topology: Topology) -> Self {
        Self {
            grid_size,
            search_range: if grid_size <= 8 { 7 } else { 9 },
            max_iterations: DEFAULT_ITERATIONS,
            use_coarse: true,
            topology,
            schedule: Schedule::Sequential,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_size < MIN_GRID_SIZE {
            return Err(Error::parameter(format!(
                "grid size {} below minimum {MIN_GRID_SIZE}",
                self.grid_size
            )));
        }
        if self.search_range > MV_CLAMP as usize {
            return Err(Error::parameter(format!(
                "search range {} exceeds vector clamp {MV_CLAMP}",
                self.search_range
            )));
        }
        Ok(())
    }
}

/// State after one refinement iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// 1-based.
    pub iteration: usize,
    /// Points evaluated in this iteration.
    pub active_points: usize,
    /// Points whose vector changed in this iteration.
    pub updated_points: usize,
    /// Squared prediction error over the whole slice after the iteration.
    pub global_ssd: f64,
    /// PSNR of the floored mesh prediction against the current slice.
    pub comp_psnr_db: f64,
    /// PSNR of the floored approximate inverse warp of the current slice
    /// against the reference slice.
    pub inv_psnr_db: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceTrace {
    pub initial_ssd: f64,
    pub records: Vec<IterationRecord>,
    /// Stopped because an iteration updated nothing.
    pub converged: bool,
}

impl ConvergenceTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    /// Extends the trace to `len` rows by repeating the final state with no
    /// active points. A converged mesh no longer changes, so the repeated
    /// rows are what further iterations would report.
    pub fn padded(&self, len: usize) -> Vec<IterationRecord> {
        let mut rows = self.records.clone();
        if let Some(&last) = self.records.last() {
            while rows.len() < len {
                rows.push(IterationRecord {
                    iteration: rows.len() + 1,
                    active_points: 0,
                    updated_points: 0,
                    ..last
                });
            }
        }
        rows
    }
}

/// Coarse block search (if enabled) followed by refinement.
pub fn estimate(
    current: &Slice,
    reference: &Slice,
    config: &EstimationConfig,
) -> Result<(MeshMotion, ConvergenceTrace)> {
    config.validate()?;
    current.ensure_same_dims(reference)?;
    let start = if config.use_coarse {
        coarse_estimate(current, reference, config)?
    } else {
        make_regular_grid(
            current.width(),
            current.height(),
            config.grid_size,
            config.topology,
        )?
    };
    refine(current, reference, &start, config)
}
