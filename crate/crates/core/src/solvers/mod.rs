//! Baseline L+S, prior-informed L+S and the sequential pipeline.

mod iterate;
mod sequence;

pub use iterate::{IterationState, SolveResult};
pub use sequence::{prior_from_parts, prior_from_result, solve_sequence};

use crate::config::SolverConfig;
use crate::error::Result;
use crate::operators::fourier::KSpaceData;
use crate::support::Prior;

/// Baseline low-rank plus sparse reconstruction of one volume.
pub fn solve_ls(y: &KSpaceData, cfg: &SolverConfig) -> Result<SolveResult> {
    iterate::run(y, cfg, None, &mut |_| {})
}

/// [`solve_ls`] with a per-iteration callback.
pub fn solve_ls_observed(
    y: &KSpaceData,
    cfg: &SolverConfig,
    observer: &mut dyn FnMut(&IterationState<'_>),
) -> Result<SolveResult> {
    iterate::run(y, cfg, None, observer)
}

/// Reconstruction guided by the previous frame's spectrum and wavelet
/// support.
pub fn solve_priori_ls(y: &KSpaceData, prior: &Prior, cfg: &SolverConfig) -> Result<SolveResult> {
    iterate::check_prior_dims(y, prior)?;
    iterate::run(y, cfg, Some(prior), &mut |_| {})
}

pub fn solve_priori_ls_observed(
    y: &KSpaceData,
    prior: &Prior,
    cfg: &SolverConfig,
    observer: &mut dyn FnMut(&IterationState<'_>),
) -> Result<SolveResult> {
    iterate::check_prior_dims(y, prior)?;
    iterate::run(y, cfg, Some(prior), observer)
}
