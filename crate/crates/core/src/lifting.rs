//! Motion-compensated Haar lifting along time.
//!
//! Prediction: `H = f_odd - floor(W(f_even))`
//! Update:     `L = f_even + floor(W'(H) / 2)`
//!
//! `W` warps the even slice toward the odd one; `W'` is the approximate
//! inverse warp regenerated from the same motion description. Because the
//! synthesis side recomputes both floored terms from identical inputs,
//! reconstruction is bit-exact whatever the motion vectors are.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::compensation::Compensator;
use crate::error::{Error, Result};
use crate::estimation::{block_estimate, estimate, ConvergenceTrace, EstimationConfig};
use crate::mesh::Topology;
use crate::volume::{Slice, TemporalSequence};

#[derive(Debug, Clone, PartialEq)]
pub struct SubbandPair {
    pub lp: Slice,
    pub hp: Slice,
    pub compensator: Compensator,
}

pub fn forward(f_even: &Slice, f_odd: &Slice, comp: &Compensator) -> Result<SubbandPair> {
    f_even.ensure_same_dims(f_odd)?;
    comp.check(f_even.width(), f_even.height())?;
    let bit_depth = f_even.bit_depth();

    let prediction = comp.predict(f_even)?.floor(bit_depth)?;
    let hp = Slice::new(
        f_odd.width(),
        f_odd.height(),
        f_odd
            .samples()
            .iter()
            .zip(prediction.samples())
            .map(|(&o, &p)| o - p)
            .collect(),
        bit_depth,
    )?;

    let update = half_floor(comp.inverse_predict(&hp)?.data());
    let lp = Slice::new(
        f_even.width(),
        f_even.height(),
        f_even
            .samples()
            .iter()
            .zip(&update)
            .map(|(&e, &u)| e + u)
            .collect(),
        bit_depth,
    )?;

    Ok(SubbandPair {
        lp,
        hp,
        compensator: comp.clone(),
    })
}

pub fn inverse(bands: &SubbandPair) -> Result<(Slice, Slice)> {
    let SubbandPair {
        lp,
        hp,
        compensator,
    } = bands;
    lp.ensure_same_dims(hp)
        .map_err(|e| Error::Sidecar(format!("subband shapes differ: {e}")))?;
    compensator.check(lp.width(), lp.height())?;
    let bit_depth = lp.bit_depth();

    let update = half_floor(compensator.inverse_predict(hp)?.data());
    let f_even = Slice::new(
        lp.width(),
        lp.height(),
        lp.samples()
            .iter()
            .zip(&update)
            .map(|(&l, &u)| l - u)
            .collect(),
        bit_depth,
    )?;

    let prediction = compensator.predict(&f_even)?.floor(bit_depth)?;
    let f_odd = Slice::new(
        hp.width(),
        hp.height(),
        hp.samples()
            .iter()
            .zip(prediction.samples())
            .map(|(&h, &p)| h + p)
            .collect(),
        bit_depth,
    )?;
    Ok((f_even, f_odd))
}

fn half_floor(values: &[f64]) -> Vec<i32> {
    values.iter().map(|v| (0.5 * v).floor() as i32).collect()
}

/// Compensation method of a transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    None,
    Block,
    Triangle,
    Quadrilateral,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::None,
        Method::Block,
        Method::Triangle,
        Method::Quadrilateral,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Method::None => "none",
            Method::Block => "block",
            Method::Triangle => "tri",
            Method::Quadrilateral => "quad",
        }
    }

    pub fn topology(self) -> Option<Topology> {
        match self {
            Method::Triangle => Some(Topology::Triangle),
            Method::Quadrilateral => Some(Topology::Quadrilateral),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.label() == s)
            .ok_or_else(|| Error::parameter(format!("unknown method `{s}`")))
    }
}

/// Method plus the estimation settings used for each pair. Block
/// compensation uses `grid_size` as block size and the same search range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompConfig {
    pub method: Method,
    pub estimation: EstimationConfig,
}

impl CompConfig {
    pub fn new(method: Method, estimation: EstimationConfig) -> Self {
        let mut estimation = estimation;
        if let Some(t) = method.topology() {
            estimation.topology = t;
        }
        Self { method, estimation }
    }
}

/// Estimates the compensator for one pair; mesh methods also return their
/// refinement trace.
pub fn estimate_compensator(
    f_even: &Slice,
    f_odd: &Slice,
    config: &CompConfig,
) -> Result<(Compensator, Option<ConvergenceTrace>)> {
    let est = &config.estimation;
    match config.method {
        Method::None => Ok((Compensator::None, None)),
        Method::Block => {
            est.validate()?;
            let blocks = block_estimate(f_odd, f_even, est.grid_size, est.search_range)?;
            Ok((Compensator::Block(blocks), None))
        }
        Method::Triangle | Method::Quadrilateral => {
            let (mesh, trace) = estimate(f_odd, f_even, est)?;
            Ok((Compensator::Mesh(mesh), Some(trace)))
        }
    }
}

/// One temporal decomposition level with fresh motion per pair.
pub fn transform_sequence(seq: &TemporalSequence, config: &CompConfig) -> Result<Vec<SubbandPair>> {
    Ok(transform_sequence_traced(seq, config)?
        .into_iter()
        .map(|(bands, _)| bands)
        .collect())
}

pub fn transform_sequence_traced(
    seq: &TemporalSequence,
    config: &CompConfig,
) -> Result<Vec<(SubbandPair, Option<ConvergenceTrace>)>> {
    let pairs: Vec<(&Slice, &Slice)> = seq.pairs()?.collect();
    pairs
        .par_iter()
        .map(|&(even, odd)| {
            let (comp, trace) = estimate_compensator(even, odd, config)?;
            Ok((forward(even, odd, &comp)?, trace))
        })
        .collect()
}

/// Rebuilds the sequence `f_0, f_1, ...` from its subband pairs.
pub fn inverse_sequence(pairs: &[SubbandPair]) -> Result<TemporalSequence> {
    let mut slices = Vec::with_capacity(pairs.len() * 2);
    for bands in pairs {
        let (even, odd) = inverse(bands)?;
        slices.push(even);
        slices.push(odd);
    }
    TemporalSequence::new(slices, 0)
}
