//! Variable-density Cartesian k-space sampling masks.
//!
//! Masks are stored in centered layout: grid cell `(i, j)` corresponds to
//! frequency bin `((i − nx/2) mod nx, (j − ny/2) mod ny)`, so the DC term sits
//! at `(nx/2, ny/2)`.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplingMask {
    pattern: Array2<bool>,
    m: usize,
}

impl SamplingMask {
    pub fn from_pattern(pattern: Array2<bool>) -> Result<Self> {
        let m = pattern.iter().filter(|&&b| b).count();
        if m == 0 {
            return Err(Error::Invalid("sampling mask selects no frequencies".into()));
        }
        Ok(SamplingMask { pattern, m })
    }

    pub fn full(nx: usize, ny: usize) -> Self {
        SamplingMask {
            pattern: Array2::from_elem((nx, ny), true),
            m: nx * ny,
        }
    }

    /// Only the DC frequency.
    pub fn dc_only(nx: usize, ny: usize) -> Self {
        let mut pattern = Array2::from_elem((nx, ny), false);
        pattern[[nx / 2, ny / 2]] = true;
        SamplingMask { pattern, m: 1 }
    }

    pub fn pattern(&self) -> &Array2<bool> {
        &self.pattern
    }

    pub fn shape(&self) -> (usize, usize) {
        self.pattern.dim()
    }

    /// Number of sampled frequencies.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rate(&self) -> f64 {
        self.m as f64 / self.pattern.len() as f64
    }

    pub fn center(&self) -> (usize, usize) {
        let (nx, ny) = self.shape();
        (nx / 2, ny / 2)
    }

    /// Euclidean distance of grid cell `(i, j)` from the DC cell.
    pub fn distance_from_center(&self, i: usize, j: usize) -> f64 {
        let (cx, cy) = self.center();
        let dx = i as f64 - cx as f64;
        let dy = j as f64 - cy as f64;
        dx.hypot(dy)
    }

    /// Sampled positions as linear indices `kx + nx·ky` into an unshifted
    /// 2D spectrum, walking the centered grid in column-major order. This
    /// fixes the row order of acquired samples.
    pub fn sampled_frequencies(&self) -> Vec<usize> {
        let (nx, ny) = self.shape();
        let mut out = Vec::with_capacity(self.m);
        for j in 0..ny {
            for i in 0..nx {
                if self.pattern[[i, j]] {
                    let kx = (i + nx - nx / 2) % nx;
                    let ky = (j + ny - ny / 2) % ny;
                    out.push(kx + nx * ky);
                }
            }
        }
        out
    }
}

/// Parameters of the variable-density law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskSpec {
    pub nx: usize,
    pub ny: usize,
    pub rate: f64,
    pub density_falloff: f64,
    pub seed: u64,
}

pub const DEFAULT_DENSITY_FALLOFF: f64 = 4.0;

/// Draws `round(rate·nx·ny)` distinct frequencies with probability weight
/// `(1 + d/d0)^(−falloff)`, `d0` being an eighth of the grid diagonal. The
/// DC cell is always included.
pub fn make_mask(nx: usize, ny: usize, rate: f64, density_falloff: f64, seed: u64) -> Result<SamplingMask> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::Invalid(format!("sampling rate {rate} outside (0, 1]")));
    }
    if !(density_falloff > 0.0 && density_falloff.is_finite()) {
        return Err(Error::Invalid(format!(
            "density falloff must be positive, got {density_falloff}"
        )));
    }
    if nx == 0 || ny == 0 {
        return Err(Error::Invalid("mask dimensions must be positive".into()));
    }
    let total = nx * ny;
    let k = (rate * total as f64).round() as usize;
    if k == 0 {
        return Err(Error::Invalid(format!(
            "rate {rate} selects no samples on a {nx}x{ny} grid"
        )));
    }

    let d0 = (nx as f64).hypot(ny as f64) / 8.0;
    let (cx, cy) = (nx / 2, ny / 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Weighted sampling without replacement: keep the k largest ln(u)/w.
    let mut keyed: Vec<(f64, usize)> = Vec::with_capacity(total);
    for j in 0..ny {
        for i in 0..nx {
            let u: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
            let idx = i + nx * j;
            if (i, j) == (cx, cy) {
                keyed.push((f64::INFINITY, idx));
                continue;
            }
            let d = (i as f64 - cx as f64).hypot(j as f64 - cy as f64);
            let w = (1.0 + d / d0).powf(-density_falloff);
            keyed.push((u.ln() / w, idx));
        }
    }
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut pattern = Array2::from_elem((nx, ny), false);
    for &(_, idx) in keyed.iter().take(k) {
        pattern[[idx % nx, idx / nx]] = true;
    }
    Ok(SamplingMask { pattern, m: k })
}

impl MaskSpec {
    pub fn build(&self) -> Result<SamplingMask> {
        make_mask(self.nx, self.ny, self.rate, self.density_falloff, self.seed)
    }
}
