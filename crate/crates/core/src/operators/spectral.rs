//! Singular-value map and the two spectral proximal steps.
//!
//! Rebuilding a matrix from a modified spectrum reuses the singular vectors
//! of the matrix being modified.

use nalgebra::DMatrix;
use ndarray::{Array2, ShapeBuilder};

use crate::error::{Error, Result};
use crate::prox::soft_threshold_real;
use crate::volume::CMatrix;

const SVD_MAX_SWEEPS: usize = 10_000;

/// Thin SVD `M = U·diag(sigma)·Vᴴ` with `sigma` descending.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

impl SpectralDecomposition {
    /// `U·diag(sigma)·Vᴴ` with a caller-supplied spectrum.
    pub fn rebuild(&self, sigma: &[f64]) -> CMatrix {
        let (rows, k) = self.u.dim();
        let cols = self.v.nrows();
        debug_assert_eq!(sigma.len(), k);
        let mut out = Array2::zeros((rows, cols).f());
        for (i, &s) in sigma.iter().enumerate() {
            if s == 0.0 {
                continue;
            }
            let ui = self.u.column(i);
            for j in 0..cols {
                let w = self.v[[j, i]].conj() * s;
                out.column_mut(j).zip_mut_with(&ui, |o, u| *o += u * w);
            }
        }
        out
    }

    pub fn recompose(&self) -> CMatrix {
        self.rebuild(&self.sigma)
    }

    pub fn rank(&self, rel_tol: f64) -> usize {
        let top = self.sigma.first().copied().unwrap_or(0.0);
        self.sigma.iter().filter(|&&s| s > rel_tol * top).count()
    }
}

pub fn svd(m: &CMatrix) -> Result<SpectralDecomposition> {
    let (rows, cols) = m.dim();
    if rows == 0 || cols == 0 {
        return Err(Error::Invalid("svd of an empty matrix".into()));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("svd input contains non-finite values".into()));
    }
    let dm = DMatrix::from_fn(rows, cols, |i, j| m[[i, j]]);
    let dec = nalgebra::SVD::try_new(dm, true, true, f64::EPSILON, SVD_MAX_SWEEPS)
        .ok_or_else(|| Error::Numerical(format!("svd of {rows}x{cols} matrix did not converge")))?;
    let u = dec.u.as_ref().expect("left vectors requested");
    let v_t = dec.v_t.as_ref().expect("right vectors requested");
    let k = dec.singular_values.len();
    Ok(SpectralDecomposition {
        u: Array2::from_shape_fn((rows, k).f(), |(i, j)| u[(i, j)]),
        sigma: dec.singular_values.iter().copied().collect(),
        v: Array2::from_shape_fn((cols, k).f(), |(i, j)| v_t[(j, i)].conj()),
    })
}

/// Soft-thresholds a spectrum.
pub fn shrink_spectrum(sigma: &[f64], lambda: f64) -> Vec<f64> {
    sigma.iter().map(|&s| soft_threshold_real(s, lambda)).collect()
}

/// One gradient step of `½‖σ − σ_prev‖²` with step `lambda_p`, clamped at
/// zero. Returns the new spectrum and whether the clamp fired.
pub fn step_toward_prior(sigma: &[f64], sigma_prev: &[f64], lambda_p: f64) -> (Vec<f64>, bool) {
    let mut clamped = false;
    let out = sigma
        .iter()
        .zip(sigma_prev)
        .map(|(&s, &p)| {
            let v = s - lambda_p * (s - p);
            if v < 0.0 {
                clamped = true;
                0.0
            } else {
                v
            }
        })
        .collect();
    (out, clamped)
}

/// Singular-value soft-thresholding, the proximal operator of `λ‖·‖_*`.
pub fn sv_threshold(m: &CMatrix, lambda: f64) -> Result<CMatrix> {
    check_lambda(lambda)?;
    let dec = svd(m)?;
    Ok(dec.rebuild(&shrink_spectrum(&dec.sigma, lambda)))
}

pub(crate) fn check_prior_step(sigma_len: usize, sigma_prev: &[f64], lambda_p: f64) -> Result<()> {
    if sigma_prev.len() != sigma_len {
        return Err(Error::Shape {
            expected: format!("prior spectrum of length {sigma_len}"),
            actual: format!("length {}", sigma_prev.len()),
        });
    }
    if !(0.0..=1.0).contains(&lambda_p) {
        return Err(Error::Invalid(format!("prior step {lambda_p} outside [0, 1]")));
    }
    Ok(())
}

/// Moves the spectrum of `m` a fraction `lambda_p` of the way toward
/// `sigma_prev`, keeping its singular vectors.
pub fn apply_sigma_prior(m: &CMatrix, sigma_prev: &[f64], lambda_p: f64) -> Result<CMatrix> {
    check_prior_step(m.ncols().min(m.nrows()), sigma_prev, lambda_p)?;
    if lambda_p == 0.0 {
        return Ok(m.clone());
    }
    let dec = svd(m)?;
    let (sigma, _) = step_toward_prior(&dec.sigma, sigma_prev, lambda_p);
    Ok(dec.rebuild(&sigma))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Invalid(format!(
            "threshold {lambda} must be finite and non-negative"
        )));
    }
    Ok(())
}
