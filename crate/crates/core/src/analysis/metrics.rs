use crate::error::Result;
use crate::volume::Slice;

pub fn mse(a: &Slice, b: &Slice) -> Result<f64> {
    a.ensure_same_dims(b)?;
    let sum: f64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(&x, &y)| {
            let d = (x - y) as f64;
            d * d
        })
        .sum();
    Ok(sum / a.samples().len() as f64)
}

/// `10 log10(peak^2 / MSE)`; identical slices give `f64::INFINITY`.
pub fn psnr(a: &Slice, b: &Slice, peak: f64) -> Result<f64> {
    let mse = mse(a, b)?;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (peak * peak / mse).log10())
}

/// Sum of squared coefficients.
pub fn hp_energy(h: &Slice) -> u64 {
    h.samples()
        .iter()
        .map(|&v| (v as i64 * v as i64) as u64)
        .sum()
}
