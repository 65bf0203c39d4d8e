//! Synthetic stand-in for a dynamic CT slice sequence.
//!
//! A base image made of Gaussian bumps plus a fixed noise texture is
//! resampled around the image center with one radial scale factor per time
//! step. Pixel `p` of step `t` shows base position `c + s_t (p - c)`.

use super::{Slice, TemporalSequence, DEFAULT_BIT_DEPTH};
use crate::error::{Error, Result};
use crate::rng::XorShift64Star;

#[derive(Debug, Clone, PartialEq)]
pub struct PhantomSpec {
    pub width: usize,
    pub height: usize,
    pub time_steps: usize,
    pub scale_factors: Vec<f64>,
    pub blob_count: usize,
    pub noise_amplitude: f64,
    pub seed: u64,
}

impl PhantomSpec {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::parameter("phantom dimensions must be non-zero"));
        }
        if self.time_steps < 2 {
            return Err(Error::parameter("phantom needs at least two time steps"));
        }
        if self.scale_factors.len() != self.time_steps {
            return Err(Error::parameter(format!(
                "{} scale factors for {} time steps",
                self.scale_factors.len(),
                self.time_steps
            )));
        }
        if let Some(s) = self
            .scale_factors
            .iter()
            .find(|s| !(**s > 0.5 && **s < 2.0))
        {
            return Err(Error::parameter(format!(
                "scale factor {s} not in (0.5, 2.0)"
            )));
        }
        if self.noise_amplitude.is_nan() || self.noise_amplitude < 0.0 {
            return Err(Error::parameter("noise amplitude must be non-negative"));
        }
        Ok(())
    }

    /// Center of the radial motion, `((w-1)/2, (h-1)/2)`.
    pub fn center(&self) -> (f64, f64) {
        (
            (self.width as f64 - 1.0) / 2.0,
            (self.height as f64 - 1.0) / 2.0,
        )
    }

    /// Backward displacement from a pixel of step `current` to the position
    /// showing the same tissue in step `reference`.
    pub fn true_displacement(
        &self,
        reference: usize,
        current: usize,
        x: f64,
        y: f64,
    ) -> (f64, f64) {
        let (cx, cy) = self.center();
        let ratio = self.scale_factors[current] / self.scale_factors[reference];
        ((ratio - 1.0) * (x - cx), (ratio - 1.0) * (y - cy))
    }
}

struct Blob {
    cx: f64,
    cy: f64,
    inv_two_sigma_sq: f64,
    amplitude: f64,
}

struct BaseImage {
    width: usize,
    height: usize,
    blobs: Vec<Blob>,
    noise: Vec<f64>,
}

impl BaseImage {
    fn new(spec: &PhantomSpec) -> Self {
        let mut rng = XorShift64Star::new(spec.seed);
        let (w, h) = (spec.width as f64, spec.height as f64);
        let max_sigma = (w.min(h) / 8.0).max(2.0);
        let blobs = (0..spec.blob_count)
            .map(|_| {
                let cx = rng.uniform(0.0, w);
                let cy = rng.uniform(0.0, h);
                let sigma = rng.uniform(1.5, max_sigma);
                let amplitude = rng.uniform(300.0, 1500.0);
                Blob {
                    cx,
                    cy,
                    inv_two_sigma_sq: 1.0 / (2.0 * sigma * sigma),
                    amplitude,
                }
            })
            .collect();
        let noise = if spec.noise_amplitude > 0.0 {
            (0..spec.width * spec.height)
                .map(|_| rng.uniform(-spec.noise_amplitude, spec.noise_amplitude))
                .collect()
        } else {
            vec![0.0; spec.width * spec.height]
        };
        Self {
            width: spec.width,
            height: spec.height,
            blobs,
            noise,
        }
    }

    /// Bumps are evaluated analytically; the noise texture is bilinearly
    /// interpolated with edge clamping.
    fn value(&self, x: f64, y: f64) -> f64 {
        let bumps: f64 = self
            .blobs
            .iter()
            .map(|b| {
                let (dx, dy) = (x - b.cx, y - b.cy);
                b.amplitude * (-(dx * dx + dy * dy) * b.inv_two_sigma_sq).exp()
            })
            .sum();
        bumps + self.noise_at(x, y)
    }

    fn noise_at(&self, x: f64, y: f64) -> f64 {
        let x = x.clamp(0.0, (self.width - 1) as f64);
        let y = y.clamp(0.0, (self.height - 1) as f64);
        let (x0, y0) = (x.floor() as usize, y.floor() as usize);
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let (fx, fy) = (x - x0 as f64, y - y0 as f64);
        let at = |xx: usize, yy: usize| self.noise[yy * self.width + xx];
        let top = at(x0, y0) + fx * (at(x1, y0) - at(x0, y0));
        let bottom = at(x0, y1) + fx * (at(x1, y1) - at(x0, y1));
        top + fy * (bottom - top)
    }
}

/// Deterministic phantom sequence for `spec`.
pub fn generate_phantom(spec: &PhantomSpec) -> Result<TemporalSequence> {
    spec.validate()?;
    let base = BaseImage::new(spec);
    let (cx, cy) = spec.center();
    let max = (1i32 << DEFAULT_BIT_DEPTH) - 1;
    let slices = spec
        .scale_factors
        .iter()
        .map(|&s| {
            Slice::from_fn(spec.width, spec.height, DEFAULT_BIT_DEPTH, |x, y| {
                let bx = cx + s * (x as f64 - cx);
                let by = cy + s * (y as f64 - cy);
                let v = (base.value(bx, by) + 0.5).floor();
                (v as i32).clamp(0, max)
            })
        })
        .collect();
    TemporalSequence::new(slices, 0)
}
