//! Reversible integer 5/3 wavelet with whole-sample symmetric extension.
//!
//! Predict: `d[k] = x[2k+1] - floor((x[2k] + x[2k+2]) / 2)`
//! Update:  `s[k] = x[2k] + floor((d[k-1] + d[k] + 2) / 4)`
//!
//! The 2-D transform is separable (rows, then columns) and recursive on the
//! low-low band, leaving the usual Mallat layout.

use crate::error::{Error, Result};
use crate::volume::Slice;

/// Mirror index for whole-sample symmetric extension of length `n`.
#[inline]
fn mirror(i: isize, n: usize) -> usize {
    let n = n as isize;
    let mut i = i;
    if i < 0 {
        i = -i;
    }
    if i >= n {
        i = 2 * (n - 1) - i;
    }
    i as usize
}

/// One analysis level on a 1-D signal; returns `(low, high)` with
/// `ceil(n/2)` and `floor(n/2)` coefficients.
pub fn dwt53_forward_1d(x: &[i32]) -> (Vec<i32>, Vec<i32>) {
    let n = x.len();
    if n < 2 {
        return (x.to_vec(), Vec::new());
    }
    let high: Vec<i32> = (0..n / 2)
        .map(|k| {
            let left = x[2 * k];
            let right = x[mirror(2 * k as isize + 2, n)];
            x[2 * k + 1] - ((left + right) >> 1)
        })
        .collect();
    let d = |k: isize| high[mirror(2 * k + 1, n) / 2];
    let low: Vec<i32> = (0..n.div_ceil(2))
        .map(|k| {
            let k = k as isize;
            x[2 * k as usize] + ((d(k - 1) + d(k) + 2) >> 2)
        })
        .collect();
    (low, high)
}

/// Exact inverse of [`dwt53_forward_1d`].
pub fn dwt53_inverse_1d(low: &[i32], high: &[i32]) -> Vec<i32> {
    let n = low.len() + high.len();
    if n < 2 {
        return low.to_vec();
    }
    let mut x = vec![0i32; n];
    let d = |k: isize| high[mirror(2 * k + 1, n) / 2];
    for k in 0..low.len() {
        let ki = k as isize;
        x[2 * k] = low[k] - ((d(ki - 1) + d(ki) + 2) >> 2);
    }
    for k in 0..high.len() {
        let left = x[2 * k];
        let right = x[mirror(2 * k as isize + 2, n)];
        x[2 * k + 1] = high[k] + ((left + right) >> 1);
    }
    x
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl Rect {
    pub fn area(&self) -> usize {
        self.width * self.height
    }
}

fn check_levels(width: usize, height: usize, levels: usize) -> Result<()> {
    if levels == 0 {
        return Err(Error::parameter(
            "at least one decomposition level required",
        ));
    }
    let min = 1usize.checked_shl(levels as u32).unwrap_or(usize::MAX);
    if width < min || height < min {
        return Err(Error::parameter(format!(
            "{width}x{height} slice too small for {levels} levels"
        )));
    }
    Ok(())
}

/// Subband rectangles of a `levels`-deep Mallat layout: HL, LH, HH for each
/// level from fine to coarse, then the final LL.
pub fn subbands(width: usize, height: usize, levels: usize) -> Result<Vec<Rect>> {
    check_levels(width, height, levels)?;
    let mut out = Vec::with_capacity(3 * levels + 1);
    let (mut w, mut h) = (width, height);
    for _ in 0..levels {
        let (lw, lh) = (w.div_ceil(2), h.div_ceil(2));
        out.push(Rect {
            x: lw,
            y: 0,
            width: w - lw,
            height: lh,
        });
        out.push(Rect {
            x: 0,
            y: lh,
            width: lw,
            height: h - lh,
        });
        out.push(Rect {
            x: lw,
            y: lh,
            width: w - lw,
            height: h - lh,
        });
        (w, h) = (lw, lh);
    }
    out.push(Rect {
        x: 0,
        y: 0,
        width: w,
        height: h,
    });
    Ok(out)
}

pub fn dwt53_forward(s: &Slice, levels: usize) -> Result<Slice> {
    let (width, height) = s.dims();
    check_levels(width, height, levels)?;
    let mut buf = s.samples().to_vec();
    let (mut w, mut h) = (width, height);
    for _ in 0..levels {
        for y in 0..h {
            let row = &mut buf[y * width..y * width + w];
            let (low, high) = dwt53_forward_1d(row);
            row[..low.len()].copy_from_slice(&low);
            row[low.len()..].copy_from_slice(&high);
        }
        let mut col = vec![0i32; h];
        for x in 0..w {
            for y in 0..h {
                col[y] = buf[y * width + x];
            }
            let (low, high) = dwt53_forward_1d(&col);
            for (y, v) in low.iter().chain(&high).enumerate() {
                buf[y * width + x] = *v;
            }
        }
        (w, h) = (w.div_ceil(2), h.div_ceil(2));
    }
    Slice::new(width, height, buf, s.bit_depth())
}

pub fn dwt53_inverse(coeffs: &Slice, levels: usize) -> Result<Slice> {
    let (width, height) = coeffs.dims();
    check_levels(width, height, levels)?;
    let mut sizes = Vec::with_capacity(levels);
    let (mut w, mut h) = (width, height);
    for _ in 0..levels {
        sizes.push((w, h));
        (w, h) = (w.div_ceil(2), h.div_ceil(2));
    }
    let mut buf = coeffs.samples().to_vec();
    for &(w, h) in sizes.iter().rev() {
        let lh = h.div_ceil(2);
        let mut col = vec![0i32; h];
        for x in 0..w {
            for y in 0..h {
                col[y] = buf[y * width + x];
            }
            let rec = dwt53_inverse_1d(&col[..lh], &col[lh..]);
            for (y, v) in rec.into_iter().enumerate() {
                buf[y * width + x] = v;
            }
        }
        let lw = w.div_ceil(2);
        for y in 0..h {
            let row = &mut buf[y * width..y * width + w];
            let rec = dwt53_inverse_1d(&row[..lw], &row[lw..]);
            row.copy_from_slice(&rec);
        }
    }
    Slice::new(width, height, buf, coeffs.bit_depth())
}
