//! Measurement operator, sparsifying transform, spectral maps and masks.

pub mod fourier;
pub mod mask;
pub mod sparsity;
pub mod spectral;
pub mod wavelet;

pub use fourier::{acquire, acquire_adjoint, Acquisition, KSpaceData};
pub use mask::{make_mask, MaskSpec, SamplingMask, DEFAULT_DENSITY_FALLOFF};
pub use sparsity::extract_support;
pub use spectral::{apply_sigma_prior, sv_threshold, svd, SpectralDecomposition};
pub use wavelet::{wavelet_forward, wavelet_inverse, Wavelet2d};
