//! Orthogonal 2D Daubechies wavelet transform applied slice by slice.
//!
//! Periodic boundaries, Mallat layout: after each level the approximation
//! band occupies the low-index quarter of the active block and the next level
//! recurses into it.

use ndarray::{Array2, ShapeBuilder};
use num_complex::Complex64;

use crate::error::{shape_err, Error, Result};
use crate::volume::{CMatrix, Dims, DynamicVolume};

pub const DEFAULT_LEVELS: usize = 3;

/// Four-tap Daubechies (two vanishing moments) lowpass filter.
fn daubechies4() -> [f64; 4] {
    let s3 = 3f64.sqrt();
    let d = 4.0 * 2f64.sqrt();
    [(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d]
}

#[derive(Debug, Clone)]
pub struct Wavelet2d {
    levels: usize,
    lo: [f64; 4],
    hi: [f64; 4],
}

impl Default for Wavelet2d {
    fn default() -> Self {
        Wavelet2d::new(DEFAULT_LEVELS)
    }
}

impl Wavelet2d {
    pub fn new(levels: usize) -> Self {
        let lo = daubechies4();
        let hi = [lo[3], -lo[2], lo[1], -lo[0]];
        Wavelet2d { levels, lo, hi }
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn check_dims(&self, dims: Dims) -> Result<()> {
        let block = 1usize << self.levels;
        if !dims.nx.is_multiple_of(block) || !dims.ny.is_multiple_of(block) {
            return Err(Error::Invalid(format!(
                "{} wavelet levels need nx and ny divisible by {block}, got {}x{}",
                self.levels, dims.nx, dims.ny
            )));
        }
        Ok(())
    }

    /// One analysis step on `x[..n]` read with `stride`.
    fn analyze(
        &self,
        data: &mut [Complex64],
        start: usize,
        stride: usize,
        n: usize,
        tmp: &mut Vec<Complex64>,
    ) {
        let half = n / 2;
        tmp.clear();
        tmp.resize(n, Complex64::new(0.0, 0.0));
        for k in 0..half {
            let mut a = Complex64::new(0.0, 0.0);
            let mut d = Complex64::new(0.0, 0.0);
            for m in 0..4 {
                let v = data[start + ((2 * k + m) % n) * stride];
                a += v * self.lo[m];
                d += v * self.hi[m];
            }
            tmp[k] = a;
            tmp[half + k] = d;
        }
        for (i, v) in tmp.iter().enumerate() {
            data[start + i * stride] = *v;
        }
    }

    /// Transpose of [`Self::analyze`].
    fn synthesize(
        &self,
        data: &mut [Complex64],
        start: usize,
        stride: usize,
        n: usize,
        tmp: &mut Vec<Complex64>,
    ) {
        let half = n / 2;
        tmp.clear();
        tmp.resize(n, Complex64::new(0.0, 0.0));
        for k in 0..half {
            let a = data[start + k * stride];
            let d = data[start + (half + k) * stride];
            for m in 0..4 {
                tmp[(2 * k + m) % n] += a * self.lo[m] + d * self.hi[m];
            }
        }
        for (i, v) in tmp.iter().enumerate() {
            data[start + i * stride] = *v;
        }
    }

    pub fn forward_slice(&self, slice: &mut [Complex64], nx: usize, ny: usize) {
        let mut tmp = Vec::with_capacity(nx.max(ny));
        let (mut bx, mut by) = (nx, ny);
        for _ in 0..self.levels {
            for iy in 0..by {
                self.analyze(slice, nx * iy, 1, bx, &mut tmp);
            }
            for ix in 0..bx {
                self.analyze(slice, ix, nx, by, &mut tmp);
            }
            bx /= 2;
            by /= 2;
        }
    }

    pub fn inverse_slice(&self, slice: &mut [Complex64], nx: usize, ny: usize) {
        let mut tmp = Vec::with_capacity(nx.max(ny));
        for level in (0..self.levels).rev() {
            let (bx, by) = (nx >> level, ny >> level);
            for ix in 0..bx {
                self.synthesize(slice, ix, nx, by, &mut tmp);
            }
            for iy in 0..by {
                self.synthesize(slice, nx * iy, 1, bx, &mut tmp);
            }
        }
    }

    fn per_slice(&self, m: &CMatrix, dims: Dims, inverse: bool) -> Result<CMatrix> {
        self.check_dims(dims)?;
        if m.dim() != dims.casorati_shape() {
            return Err(shape_err(
                format!("{:?}", dims.casorati_shape()),
                format!("{:?}", m.dim()),
            ));
        }
        let mut out = Array2::zeros(dims.casorati_shape().f());
        let mut buf = vec![Complex64::new(0.0, 0.0); dims.pixels()];
        for (src, mut dst) in m.columns().into_iter().zip(out.columns_mut()) {
            buf.iter_mut().zip(src.iter()).for_each(|(b, v)| *b = *v);
            if inverse {
                self.inverse_slice(&mut buf, dims.nx, dims.ny);
            } else {
                self.forward_slice(&mut buf, dims.nx, dims.ny);
            }
            dst.iter_mut().zip(buf.iter()).for_each(|(d, v)| *d = *v);
        }
        Ok(out)
    }

    /// Coefficients of a raw Casorati matrix, same shape.
    pub fn forward(&self, m: &CMatrix, dims: Dims) -> Result<CMatrix> {
        self.per_slice(m, dims, false)
    }

    pub fn inverse(&self, w: &CMatrix, dims: Dims) -> Result<CMatrix> {
        self.per_slice(w, dims, true)
    }
}

/// Default transform (Daubechies-4, three levels) of a volume.
pub fn wavelet_forward(s: &DynamicVolume) -> Result<CMatrix> {
    Wavelet2d::default().forward(s.data(), s.dims())
}

pub fn wavelet_inverse(w: &CMatrix, dims: Dims) -> Result<DynamicVolume> {
    DynamicVolume::new(Wavelet2d::default().inverse(w, dims)?, dims)
}
