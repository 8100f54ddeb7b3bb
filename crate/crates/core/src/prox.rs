//! Elementwise shrinkage operators and the stopping metric.

use ndarray::{ArrayView2, Zip};
use num_complex::Complex64;

use crate::error::Result;
use crate::support::SupportSet;
use crate::volume::{check_same_shape, frobenius, CMatrix};

/// Complex soft-thresholding `(x/|x|)·max(|x| − λ, 0)`, with `0 ↦ 0`.
#[inline]
pub fn soft_threshold(x: Complex64, lambda: f64) -> Complex64 {
    let mag = x.norm();
    if mag <= lambda || mag == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        x * ((mag - lambda) / mag)
    }
}

/// Real soft-thresholding, used on singular values.
#[inline]
pub fn soft_threshold_real(x: f64, lambda: f64) -> f64 {
    x.signum() * (x.abs() - lambda).max(0.0)
}

pub fn soft_threshold_matrix(m: &ArrayView2<Complex64>, lambda: f64) -> CMatrix {
    m.mapv(|x| soft_threshold(x, lambda))
}

/// Soft-threshold every entry except those listed in `keep`, which pass
/// through untouched.
pub fn soft_threshold_restricted(
    m: &ArrayView2<Complex64>,
    lambda: f64,
    keep: &SupportSet,
) -> Result<CMatrix> {
    let (rows, cols) = m.dim();
    keep.check_bounds(rows, cols)?;
    if keep.is_empty() {
        return Ok(soft_threshold_matrix(m, lambda));
    }
    let mask = keep.to_mask(rows, cols);
    Ok(Zip::from(m)
        .and(&mask)
        .map_collect(|&x, &kept| if kept { x } else { soft_threshold(x, lambda) }))
}

/// `‖new − old‖_F / ‖old‖_F`, falling back to `‖new‖_F` when `old` is zero.
pub fn relative_change(new: &ArrayView2<Complex64>, old: &ArrayView2<Complex64>) -> Result<f64> {
    check_same_shape(new, old)?;
    let mut num = 0.0;
    let mut den = 0.0;
    Zip::from(new).and(old).for_each(|a, b| {
        num += (a - b).norm_sqr();
        den += b.norm_sqr();
    });
    if den == 0.0 {
        Ok(frobenius(new))
    } else {
        Ok((num / den).sqrt())
    }
}
