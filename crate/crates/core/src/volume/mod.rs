//! Slices, temporal sequences and their on-disk formats.
//!
//! A [`Slice`] is a single 2-D grid of integer samples. Original data is
//! unsigned within `bit_depth` bits; lifting subbands reuse the same type
//! with signed values.

mod io;
mod phantom;

pub use io::{
    load_pgm, load_raw, read_volume, save_pgm, save_raw, sidecar_path, write_volume, RawHeader,
    SUBBAND_OFFSET,
};
pub use phantom::{generate_phantom, PhantomSpec};

use crate::error::{Error, Result};

pub const DEFAULT_BIT_DEPTH: u8 = 12;

pub const SAMPLE_MIN: i32 = i16::MIN as i32;
pub const SAMPLE_MAX: i32 = i16::MAX as i32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slice {
    width: usize,
    height: usize,
    bit_depth: u8,
    samples: Vec<i32>,
}

impl Slice {
    pub fn new(width: usize, height: usize, samples: Vec<i32>, bit_depth: u8) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::parameter("slice dimensions must be non-zero"));
        }
        if samples.len() != width * height {
            return Err(Error::format(format!(
                "{} samples for a {}x{} slice",
                samples.len(),
                width,
                height
            )));
        }
        if bit_depth == 0 || bit_depth > 16 {
            return Err(Error::parameter(format!(
                "bit depth {bit_depth} not in 1..=16"
            )));
        }
        if let Some(&s) = samples
            .iter()
            .find(|&&s| !(SAMPLE_MIN..=SAMPLE_MAX).contains(&s))
        {
            return Err(Error::Range(format!(
                "sample {s} outside signed 16-bit range"
            )));
        }
        Ok(Self {
            width,
            height,
            bit_depth,
            samples,
        })
    }

    pub fn zeros(width: usize, height: usize, bit_depth: u8) -> Self {
        Self::filled(width, height, bit_depth, 0)
    }

    pub fn filled(width: usize, height: usize, bit_depth: u8, value: i32) -> Self {
        assert!(width > 0 && height > 0);
        assert!((SAMPLE_MIN..=SAMPLE_MAX).contains(&value));
        Self {
            width,
            height,
            bit_depth,
            samples: vec![value; width * height],
        }
    }

    /// Builds a slice from a per-pixel function `f(x, y)`.
    ///
    /// Panics if a produced value leaves the signed 16-bit range.
    pub fn from_fn(
        width: usize,
        height: usize,
        bit_depth: u8,
        mut f: impl FnMut(usize, usize) -> i32,
    ) -> Self {
        let mut samples = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                samples.push(f(x, y));
            }
        }
        Self::new(width, height, samples, bit_depth).expect("from_fn produced an invalid slice")
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

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    /// Largest value representable by an original (unsigned) sample.
    pub fn max_value(&self) -> i32 {
        (1i32 << self.bit_depth) - 1
    }

    pub fn samples(&self) -> &[i32] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<i32> {
        self.samples
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> i32 {
        self.samples[y * self.width + x]
    }

    /// Sample with coordinates clamped to the slice rectangle.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> i32 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.samples[y * self.width + x]
    }

    pub fn ensure_same_dims(&self, other: &Slice) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::Dimension {
                expected: self.dims(),
                actual: other.dims(),
            });
        }
        Ok(())
    }

    /// Whether every sample lies in `[0, 2^bit_depth - 1]`.
    pub fn is_unsigned_in_range(&self) -> bool {
        let max = self.max_value();
        self.samples.iter().all(|&s| (0..=max).contains(&s))
    }
}

/// Slices at one spatial position over time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemporalSequence {
    slices: Vec<Slice>,
    spatial_index: usize,
}

impl TemporalSequence {
    pub fn new(slices: Vec<Slice>, spatial_index: usize) -> Result<Self> {
        let first = slices
            .first()
            .ok_or_else(|| Error::parameter("a sequence needs at least one slice"))?;
        for s in &slices[1..] {
            first.ensure_same_dims(s)?;
            if s.bit_depth() != first.bit_depth() {
                return Err(Error::format("slices of a sequence differ in bit depth"));
            }
        }
        Ok(Self {
            slices,
            spatial_index,
        })
    }

    pub fn slices(&self) -> &[Slice] {
        &self.slices
    }

    pub fn into_slices(self) -> Vec<Slice> {
        self.slices
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn spatial_index(&self) -> usize {
        self.spatial_index
    }

    pub fn dims(&self) -> (usize, usize) {
        self.slices[0].dims()
    }

    pub fn bit_depth(&self) -> u8 {
        self.slices[0].bit_depth()
    }

    /// Consecutive `(f_2t, f_2t+1)` pairs; fails on odd length.
    pub fn pairs(&self) -> Result<impl Iterator<Item = (&Slice, &Slice)>> {
        if self.slices.len() < 2 || !self.slices.len().is_multiple_of(2) {
            return Err(Error::parameter(format!(
                "pairwise processing needs an even number of slices, got {}",
                self.slices.len()
            )));
        }
        Ok(self.slices.chunks_exact(2).map(|c| (&c[0], &c[1])))
    }
}
