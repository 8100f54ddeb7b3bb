//! The acquisition operator: per-slice unitary 2D DFT followed by selection
//! of the masked frequencies, and its adjoint.

use std::sync::Arc;

use ndarray::{Array2, ShapeBuilder};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{shape_err, Error, Result};
use crate::operators::mask::SamplingMask;
use crate::volume::{CMatrix, Dims, DynamicVolume};

/// Undersampled k-space measurements of one volume: `m × nz`, one column per
/// slice, rows ordered as in [`SamplingMask::sampled_frequencies`].
#[derive(Debug, Clone, PartialEq)]
pub struct KSpaceData {
    samples: CMatrix,
    mask: SamplingMask,
    dims: Dims,
}

impl KSpaceData {
    pub fn new(samples: CMatrix, mask: SamplingMask, dims: Dims) -> Result<Self> {
        if mask.shape() != (dims.nx, dims.ny) {
            return Err(shape_err(
                format!("mask {}x{}", dims.nx, dims.ny),
                format!("mask {:?}", mask.shape()),
            ));
        }
        if samples.dim() != (mask.m(), dims.nz) {
            return Err(shape_err(
                format!("samples ({}, {})", mask.m(), dims.nz),
                format!("samples {:?}", samples.dim()),
            ));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical(
                "k-space samples contain non-finite values".into(),
            ));
        }
        Ok(KSpaceData { samples, mask, dims })
    }

    pub fn samples(&self) -> &CMatrix {
        &self.samples
    }

    pub fn mask(&self) -> &SamplingMask {
        &self.mask
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }
}

/// Unitary 2D DFT on `nx × ny` slices stored with `x` varying fastest.
#[derive(Clone)]
pub struct Fft2 {
    nx: usize,
    ny: usize,
    fwd_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2")
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .finish()
    }
}

impl Fft2 {
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            nx,
            ny,
            fwd_x: planner.plan_fft_forward(nx),
            fwd_y: planner.plan_fft_forward(ny),
            inv_x: planner.plan_fft_inverse(nx),
            inv_y: planner.plan_fft_inverse(ny),
            scale: 1.0 / ((nx * ny) as f64).sqrt(),
        }
    }

    fn apply(&self, slice: &mut [Complex64], along_x: &dyn Fft<f64>, along_y: &dyn Fft<f64>) {
        let (nx, ny) = (self.nx, self.ny);
        debug_assert_eq!(slice.len(), nx * ny);
        along_x.process(slice);
        let mut t = vec![Complex64::new(0.0, 0.0); nx * ny];
        for iy in 0..ny {
            for ix in 0..nx {
                t[iy + ny * ix] = slice[ix + nx * iy];
            }
        }
        along_y.process(&mut t);
        for ix in 0..nx {
            for iy in 0..ny {
                slice[ix + nx * iy] = t[iy + ny * ix] * self.scale;
            }
        }
    }

    pub fn forward(&self, slice: &mut [Complex64]) {
        self.apply(slice, self.fwd_x.as_ref(), self.fwd_y.as_ref());
    }

    pub fn inverse(&self, slice: &mut [Complex64]) {
        self.apply(slice, self.inv_x.as_ref(), self.inv_y.as_ref());
    }
}

/// Reusable `(A, Aᴴ)` pair for one mask and volume shape.
#[derive(Debug, Clone)]
pub struct Acquisition {
    dims: Dims,
    mask: SamplingMask,
    sampled: Vec<usize>,
    fft: Fft2,
}

impl Acquisition {
    pub fn new(dims: Dims, mask: SamplingMask) -> Result<Self> {
        if mask.shape() != (dims.nx, dims.ny) {
            return Err(shape_err(
                format!("mask {}x{}", dims.nx, dims.ny),
                format!("mask {:?}", mask.shape()),
            ));
        }
        Ok(Acquisition {
            dims,
            sampled: mask.sampled_frequencies(),
            fft: Fft2::new(dims.nx, dims.ny),
            mask,
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn mask(&self) -> &SamplingMask {
        &self.mask
    }

    /// `A(x)` on a raw Casorati matrix.
    pub fn forward(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.dim() != self.dims.casorati_shape() {
            return Err(shape_err(
                format!("{:?}", self.dims.casorati_shape()),
                format!("{:?}", x.dim()),
            ));
        }
        let mut out = Array2::zeros((self.sampled.len(), self.dims.nz).f());
        let mut buf = vec![Complex64::new(0.0, 0.0); self.dims.pixels()];
        for (k, col) in x.columns().into_iter().enumerate() {
            buf.iter_mut().zip(col.iter()).for_each(|(b, v)| *b = *v);
            self.fft.forward(&mut buf);
            for (row, &f) in self.sampled.iter().enumerate() {
                out[[row, k]] = buf[f];
            }
        }
        Ok(out)
    }

    /// `Aᴴ(y)` on a raw `m × nz` sample matrix: zero-fill, inverse DFT.
    pub fn adjoint(&self, y: &CMatrix) -> Result<CMatrix> {
        if y.dim() != (self.sampled.len(), self.dims.nz) {
            return Err(shape_err(
                format!("({}, {})", self.sampled.len(), self.dims.nz),
                format!("{:?}", y.dim()),
            ));
        }
        let mut out = Array2::zeros(self.dims.casorati_shape().f());
        let mut buf = vec![Complex64::new(0.0, 0.0); self.dims.pixels()];
        for (k, mut col) in out.columns_mut().into_iter().enumerate() {
            buf.fill(Complex64::new(0.0, 0.0));
            for (row, &f) in self.sampled.iter().enumerate() {
                buf[f] = y[[row, k]];
            }
            self.fft.inverse(&mut buf);
            col.iter_mut().zip(buf.iter()).for_each(|(c, v)| *c = *v);
        }
        Ok(out)
    }

    pub fn acquire(&self, x: &DynamicVolume) -> Result<KSpaceData> {
        if x.dims() != self.dims {
            return Err(shape_err(self.dims, x.dims()));
        }
        KSpaceData::new(self.forward(x.data())?, self.mask.clone(), self.dims)
    }
}

/// Measures `x` through `mask`, slice by slice.
pub fn acquire(x: &DynamicVolume, mask: &SamplingMask) -> Result<KSpaceData> {
    Acquisition::new(x.dims(), mask.clone())?.acquire(x)
}

/// Zero-filled inverse DFT of `y`, back in Casorati form.
pub fn acquire_adjoint(y: &KSpaceData) -> Result<DynamicVolume> {
    let op = Acquisition::new(y.dims(), y.mask().clone())?;
    DynamicVolume::new(op.adjoint(y.samples())?, y.dims())
}
