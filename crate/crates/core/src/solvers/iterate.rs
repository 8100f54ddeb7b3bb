//! Shared iteration for the baseline and prior-informed solvers.
//!
//! Per iteration, with proxy `X` and sparse estimate `S`:
//!
//! 1. `L ← SVT(X − S, λ_L)`
//! 2. (prior) spectrum of `L` stepped toward `σ_prev` by `λ_p`
//! 3. `S ← T⁻¹(shrink(T(X − L), λ_S))`, coefficients on the prior support
//!    left unshrunk
//! 4. `X ← L + S − Aᴴ(A(L + S) − Y)`
//!
//! The baseline is the same loop with step 2 skipped and an empty support,
//! so the two solvers share every floating-point operation in that case.

use crate::config::SolverConfig;
use crate::error::{shape_err, Error, Result};
use crate::operators::fourier::{Acquisition, KSpaceData};
use crate::operators::spectral::{check_prior_step, shrink_spectrum, step_toward_prior, svd};
use crate::operators::wavelet::Wavelet2d;
use crate::prox::{relative_change, soft_threshold_restricted};
use crate::support::{Prior, SupportSet};
use crate::volume::{frobenius, zeros, CMatrix, Decomposition};

/// Outcome of one reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub decomposition: Decomposition,
    pub iterations: usize,
    pub converged: bool,
    /// Relative change of the proxy at each iteration.
    pub residual_history: Vec<f64>,
    /// `‖Y − A(L + S)‖_F` at exit.
    pub data_residual: f64,
    /// Thresholds actually used, after resolving relative settings.
    pub lambda_l: f64,
    pub lambda_s: f64,
}

/// Snapshot handed to an observer after each iteration.
#[derive(Debug)]
pub struct IterationState<'a> {
    pub iteration: usize,
    pub low_rank: &'a CMatrix,
    pub sparse: &'a CMatrix,
    pub proxy: &'a CMatrix,
    pub relative_change: f64,
}

fn ensure_finite(m: &CMatrix, what: &str, iteration: usize) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numerical(format!(
            "non-finite {what} at iteration {iteration}"
        )))
    }
}

pub(crate) fn run(
    y: &KSpaceData,
    cfg: &SolverConfig,
    prior: Option<&Prior>,
    observer: &mut dyn FnMut(&IterationState<'_>),
) -> Result<SolveResult> {
    cfg.validate()?;
    let dims = y.dims();
    let op = Acquisition::new(dims, y.mask().clone())?;
    let wavelet = Wavelet2d::default();
    wavelet.check_dims(dims)?;

    let empty = SupportSet::new();
    let (sigma_prev, support, lambda_p) = match prior {
        Some(p) => {
            check_prior_step(dims.nz.min(dims.pixels()), p.sigma_prev(), cfg.lambda_p)?;
            p.support_prev().check_bounds(dims.pixels(), dims.nz)?;
            (Some(p.sigma_prev()), p.support_prev(), cfg.lambda_p)
        }
        None => (None, &empty, 0.0),
    };

    let samples = y.samples();
    let mut x = op.adjoint(samples)?;
    ensure_finite(&x, "initial proxy", 0)?;

    let sigma_max = svd(&x)?.sigma[0];
    let coeff_max = wavelet
        .forward(&x, dims)?
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let lambda_l = cfg.lambda_l.resolve(sigma_max);
    let lambda_s = cfg.lambda_s.resolve(coeff_max);

    let mut s = zeros(dims);
    let mut l = zeros(dims);
    let mut history = Vec::new();
    let mut converged = false;

    for it in 1..=cfg.max_iter {
        // (1) singular-value shrinkage of X − S
        let dec = svd(&(&x - &s))?;
        let mut spectrum = shrink_spectrum(&dec.sigma, lambda_l);
        // (2) pull the spectrum toward the previous frame's
        if let (Some(prev), true) = (sigma_prev, lambda_p > 0.0) {
            spectrum = step_toward_prior(&spectrum, prev, lambda_p).0;
        }
        l = dec.rebuild(&spectrum);

        // (3) wavelet shrinkage off the prior support
        let coeffs = wavelet.forward(&(&x - &l), dims)?;
        s = wavelet.inverse(
            &soft_threshold_restricted(&coeffs.view(), lambda_s, support)?,
            dims,
        )?;

        // (4) data consistency
        let sum = &l + &s;
        let resid = &op.forward(&sum)? - samples;
        let x_new = &sum - &op.adjoint(&resid)?;
        ensure_finite(&x_new, "iterate", it)?;

        let change = relative_change(&x_new.view(), &x.view())?;
        history.push(change);
        x = x_new;
        observer(&IterationState {
            iteration: it,
            low_rank: &l,
            sparse: &s,
            proxy: &x,
            relative_change: change,
        });
        if change < cfg.tol {
            converged = true;
            break;
        }
    }

    let data_residual = frobenius(&(samples - &op.forward(&(&l + &s))?).view());
    Ok(SolveResult {
        iterations: history.len(),
        converged,
        residual_history: history,
        data_residual,
        lambda_l,
        lambda_s,
        decomposition: Decomposition::new(l, s)?,
    })
}

pub(crate) fn check_prior_dims(y: &KSpaceData, prior: &Prior) -> Result<()> {
    let dims = y.dims();
    if prior.sigma_prev().len() != dims.nz.min(dims.pixels()) {
        return Err(shape_err(
            format!("prior spectrum of length {}", dims.nz),
            format!("length {}", prior.sigma_prev().len()),
        ));
    }
    prior.support_prev().check_bounds(dims.pixels(), dims.nz)
}
