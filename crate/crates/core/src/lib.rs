//! Low-rank plus sparse reconstruction of dynamic volumes from undersampled
//! k-space.
//!
//! Each time instant is a Casorati matrix `X = L + S`: `L` low rank across
//! slices, `S` sparse under a 2D wavelet transform. [`solvers::solve_ls`] is
//! the baseline iterative soft-thresholding solver. [`solvers::solve_priori_ls`]
//! additionally leaves the previous frame's wavelet support unshrunk and pulls
//! the singular values of `L` toward the previous frame's, and
//! [`solvers::solve_sequence`] threads those priors through time.

pub mod config;
pub mod error;
pub mod harness;
pub mod io;
pub mod metrics;
pub mod operators;
pub mod phantom;
pub mod prox;
pub mod solvers;
pub mod support;
pub mod volume;

pub use config::{SolverConfig, Threshold};
pub use error::{Error, Result};
pub use operators::{KSpaceData, SamplingMask};
pub use solvers::{solve_ls, solve_priori_ls, solve_sequence, SolveResult};
pub use support::{Prior, SupportSet};
pub use volume::{CMatrix, Decomposition, Dims, DynamicVolume};
