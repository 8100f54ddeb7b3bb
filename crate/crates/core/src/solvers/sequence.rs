use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::operators::fourier::KSpaceData;
use crate::operators::sparsity::extract_support;
use crate::operators::spectral::svd;
use crate::operators::wavelet::Wavelet2d;
use crate::support::Prior;
use crate::volume::{CMatrix, Dims};

use super::{solve_ls, solve_priori_ls, SolveResult};

/// Spectrum of the low-rank part and wavelet support of the sparse part of
/// a finished reconstruction.
pub fn prior_from_result(result: &SolveResult, dims: Dims, support_eps: f64) -> Result<Prior> {
    prior_from_parts(
        result.decomposition.low_rank(),
        result.decomposition.sparse(),
        dims,
        support_eps,
    )
}

/// Same as [`prior_from_result`] for components held separately, e.g.
/// loaded from disk.
pub fn prior_from_parts(low_rank: &CMatrix, sparse: &CMatrix, dims: Dims, support_eps: f64) -> Result<Prior> {
    let sigma = svd(low_rank)?.sigma;
    let coeffs = Wavelet2d::default().forward(sparse, dims)?;
    Prior::new(sigma, extract_support(&coeffs, support_eps))
}

/// Reconstructs frames in order: the first with the baseline solver, every
/// later one with the prior taken from its predecessor's result.
pub fn solve_sequence(
    frames: &[KSpaceData],
    cfg_first: &SolverConfig,
    cfg_rest: &SolverConfig,
) -> Result<Vec<SolveResult>> {
    let first = frames
        .first()
        .ok_or_else(|| Error::Invalid("empty frame sequence".into()))?;
    let dims = first.dims();
    if let Some((t, f)) = frames.iter().enumerate().find(|(_, f)| f.dims() != dims) {
        return Err(Error::Frame {
            frame: t,
            source: Box::new(Error::Invalid(format!(
                "frame dims {} differ from {dims}",
                f.dims()
            ))),
        });
    }
    let wrap = |frame: usize| {
        move |e: Error| Error::Frame {
            frame,
            source: Box::new(e),
        }
    };

    let mut results = Vec::with_capacity(frames.len());
    results.push(solve_ls(first, cfg_first).map_err(wrap(0))?);
    for (t, frame) in frames.iter().enumerate().skip(1) {
        let prior = prior_from_result(&results[t - 1], dims, cfg_rest.support_eps).map_err(wrap(t))?;
        results.push(solve_priori_ls(frame, &prior, cfg_rest).map_err(wrap(t))?);
    }
    Ok(results)
}
