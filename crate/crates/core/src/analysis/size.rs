//! Coded-size estimates for subbands.
//!
//! The default estimate transforms a slice with the 5/3 wavelet and charges
//! every subband its zero-order entropy, `ceil(N * H0 / 8)` bytes, plus a
//! fixed header. It is a proxy for a real wavelet coder, good for comparing
//! methods, not for absolute file sizes.

use std::collections::HashMap;
use std::path::Path;
use std::process::Command;

use super::dwt53::{dwt53_forward, subbands};
use crate::error::{Error, Result};
use crate::volume::{save_pgm, Slice, SUBBAND_OFFSET};

pub const HEADER_BYTES: u64 = 64;

/// Empirical zero-order entropy in bits per sample.
pub fn zero_order_entropy(values: impl IntoIterator<Item = i32>) -> f64 {
    let mut counts: HashMap<i32, u64> = HashMap::new();
    let mut total = 0u64;
    for v in values {
        *counts.entry(v).or_default() += 1;
        total += 1;
    }
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    // Sorted for a summation order independent of hashing.
    let mut c: Vec<u64> = counts.into_values().collect();
    c.sort_unstable();
    -c.iter()
        .map(|&k| {
            let p = k as f64 / n;
            p * p.log2()
        })
        .sum::<f64>()
}

pub fn size_proxy(s: &Slice, levels: usize) -> Result<u64> {
    let coeffs = dwt53_forward(s, levels)?;
    let mut total = HEADER_BYTES;
    for r in subbands(s.width(), s.height(), levels)? {
        let values = (r.y..r.y + r.height)
            .flat_map(|y| (r.x..r.x + r.width).map(move |x| (x, y)))
            .map(|(x, y)| coeffs.get(x, y));
        let h0 = zero_order_entropy(values);
        total += (r.area() as f64 * h0 / 8.0).ceil() as u64;
    }
    Ok(total)
}

/// Size produced by an external encoder.
///
/// The slice is offset into the unsigned range, written as a 16-bit PGM,
/// and `command` is run through `sh -c` with the input and output paths
/// appended as two extra arguments. The size of the output file is
/// returned.
pub fn external_size(s: &Slice, command: &str, work_dir: &Path) -> Result<u64> {
    let offset = Slice::new(
        s.width(),
        s.height(),
        s.samples().iter().map(|&v| v + SUBBAND_OFFSET).collect(),
        16,
    )?;
    let input = work_dir.join("subband.pgm");
    let output = work_dir.join("subband.coded");
    save_pgm(&offset, &input)?;
    let status = Command::new("sh")
        .arg("-c")
        .arg(format!("{command} \"$1\" \"$2\""))
        .arg("sh")
        .arg(&input)
        .arg(&output)
        .status()?;
    if !status.success() {
        return Err(Error::format(format!(
            "external encoder `{command}` failed with {status}"
        )));
    }
    Ok(std::fs::metadata(&output)?.len())
}
