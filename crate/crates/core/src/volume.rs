//! Casorati-form containers for one time instant of a dynamic volume.
//!
//! A volume of `nx × ny × nz` voxels is stored as an `(nx·ny) × nz` complex
//! matrix: column `k` is slice `k`, and pixel `(ix, iy)` of a slice lives in
//! row `ix + nx·iy`.

use ndarray::{Array2, ArrayView2, ShapeBuilder, Zip};
use num_complex::Complex64;

use crate::error::{shape_err, Error, Result};

pub type CMatrix = Array2<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl Dims {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Result<Self> {
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(Error::Invalid(format!(
                "dimensions must be positive, got {nx}x{ny}x{nz}"
            )));
        }
        Ok(Dims { nx, ny, nz })
    }

    /// Pixels per slice, i.e. the Casorati row count.
    pub fn pixels(&self) -> usize {
        self.nx * self.ny
    }

    pub fn casorati_shape(&self) -> (usize, usize) {
        (self.pixels(), self.nz)
    }

    pub fn len(&self) -> usize {
        self.pixels() * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl std::fmt::Display for Dims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}x{}", self.nx, self.ny, self.nz)
    }
}

/// Zeroed Casorati matrix in column-major layout.
pub fn zeros(dims: Dims) -> CMatrix {
    Array2::zeros(dims.casorati_shape().f())
}

pub(crate) fn check_same_shape(a: &ArrayView2<Complex64>, b: &ArrayView2<Complex64>) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(shape_err(format!("{:?}", a.dim()), format!("{:?}", b.dim())));
    }
    Ok(())
}

/// One 3D volume at a single time instant, in Casorati form.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicVolume {
    data: CMatrix,
    dims: Dims,
}

impl DynamicVolume {
    pub fn new(data: CMatrix, dims: Dims) -> Result<Self> {
        if data.dim() != dims.casorati_shape() {
            return Err(shape_err(
                format!("{:?} for dims {dims}", dims.casorati_shape()),
                format!("{:?}", data.dim()),
            ));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical("volume contains non-finite values".into()));
        }
        Ok(DynamicVolume { data, dims })
    }

    pub fn zeros(dims: Dims) -> Self {
        DynamicVolume {
            data: zeros(dims),
            dims,
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_data(self) -> CMatrix {
        self.data
    }

    /// Voxel accessor by spatial coordinates.
    pub fn voxel(&self, ix: usize, iy: usize, iz: usize) -> Complex64 {
        self.data[[ix + self.dims.nx * iy, iz]]
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.data.view())
    }
}

pub fn frobenius(m: &ArrayView2<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian inner product `<a, b> = sum conj(a) * b`.
pub fn inner(a: &ArrayView2<Complex64>, b: &ArrayView2<Complex64>) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    Zip::from(a).and(b).for_each(|x, y| acc += x.conj() * y);
    acc
}

/// A low-rank plus sparse pair sharing one Casorati shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    low_rank: CMatrix,
    sparse: CMatrix,
}

impl Decomposition {
    pub fn new(low_rank: CMatrix, sparse: CMatrix) -> Result<Self> {
        check_same_shape(&low_rank.view(), &sparse.view())?;
        Ok(Decomposition { low_rank, sparse })
    }

    pub fn low_rank(&self) -> &CMatrix {
        &self.low_rank
    }

    pub fn sparse(&self) -> &CMatrix {
        &self.sparse
    }

    /// The reconstructed image `L + S`.
    pub fn estimate(&self) -> CMatrix {
        &self.low_rank + &self.sparse
    }

    pub fn estimate_volume(&self, dims: Dims) -> Result<DynamicVolume> {
        DynamicVolume::new(self.estimate(), dims)
    }

    pub fn into_parts(self) -> (CMatrix, CMatrix) {
        (self.low_rank, self.sparse)
    }
}
