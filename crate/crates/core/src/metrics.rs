//! Image-quality metrics on magnitude images.

use ndarray::Zip;

use crate::error::{shape_err, Error, Result};
use crate::volume::DynamicVolume;

/// Reported when the estimate matches the reference exactly.
pub const PSNR_SENTINEL_DB: f64 = 300.0;

/// `20·log10(max|ref| / rmse(|ref| − |est|))` in dB.
pub fn psnr(reference: &DynamicVolume, estimate: &DynamicVolume) -> Result<f64> {
    if reference.dims() != estimate.dims() {
        return Err(shape_err(reference.dims(), estimate.dims()));
    }
    let peak = reference.data().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(Error::Invalid("PSNR reference is all zero".into()));
    }
    let mut sq = 0.0;
    Zip::from(reference.data())
        .and(estimate.data())
        .for_each(|a, b| sq += (a.norm() - b.norm()).powi(2));
    let rmse = (sq / reference.data().len() as f64).sqrt();
    if rmse == 0.0 {
        return Ok(PSNR_SENTINEL_DB);
    }
    Ok((20.0 * (peak / rmse).log10()).min(PSNR_SENTINEL_DB))
}
