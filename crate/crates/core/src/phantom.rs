//! Synthetic dynamic volumes with a known low-rank background and a sparse
//! set of moving Gaussian features.

use ndarray::{Array1, Array2, ShapeBuilder};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::volume::{CMatrix, Dims, DynamicVolume};

#[derive(Debug, Clone, PartialEq)]
pub struct PhantomSpec {
    pub dims: Dims,
    pub n_frames: usize,
    pub background_rank: usize,
    pub n_blobs: usize,
    /// Slice-specific features that do not move: part of the sparse
    /// component because they break inter-slice correlation.
    pub n_static: usize,
    pub blob_amplitude: f64,
    /// Gaussian standard deviation of each blob, in pixels.
    pub blob_width: f64,
    /// Blob displacement per frame, in pixels.
    pub motion_step: f64,
    /// Relative change of the background mixing weights per frame.
    pub drift: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for PhantomSpec {
    fn default() -> Self {
        PhantomSpec {
            dims: Dims {
                nx: 32,
                ny: 32,
                nz: 4,
            },
            n_frames: 6,
            background_rank: 2,
            n_blobs: 3,
            n_static: 16,
            blob_amplitude: 0.6,
            blob_width: 1.2,
            motion_step: 1.0,
            drift: 0.01,
            noise_sigma: 0.0,
            seed: 2024,
        }
    }
}

/// One generated time instant with its ground truth.
#[derive(Debug, Clone)]
pub struct PhantomFrame {
    /// `L_true + S_true` plus noise.
    pub volume: DynamicVolume,
    pub low_rank: CMatrix,
    pub sparse: CMatrix,
}

struct Blob {
    start: (f64, f64),
    direction: (f64, f64),
    /// Per-slice complex amplitude.
    profile: Vec<Complex64>,
}

impl PhantomSpec {
    fn margin(&self) -> f64 {
        3.0 * self.blob_width
    }

    fn travel(&self) -> f64 {
        self.motion_step * self.n_frames.saturating_sub(1) as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_frames == 0 {
            return Err(Error::Invalid("phantom needs at least one frame".into()));
        }
        if self.background_rank == 0 || self.background_rank > self.dims.nz {
            return Err(Error::Invalid(format!(
                "background rank {} must lie in 1..={}",
                self.background_rank, self.dims.nz
            )));
        }
        for (name, v) in [
            ("blob_amplitude", self.blob_amplitude),
            ("motion_step", self.motion_step),
            ("drift", self.drift),
            ("noise_sigma", self.noise_sigma),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Invalid(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        if !(self.blob_width > 0.0 && self.blob_width.is_finite()) {
            return Err(Error::Invalid(format!(
                "blob_width must be positive, got {}",
                self.blob_width
            )));
        }
        if self.n_blobs + self.n_static > 0 {
            let room = self.dims.nx.min(self.dims.ny) as f64 - 1.0 - 2.0 * self.margin();
            if self.travel() > room {
                return Err(Error::Invalid(format!(
                    "blobs travel {:.1} px over {} frames but only {:.1} px fit inside the {}x{} grid",
                    self.travel(),
                    self.n_frames,
                    room.max(0.0),
                    self.dims.nx,
                    self.dims.ny
                )));
            }
        }
        Ok(())
    }
}

fn gaussian(x: f64, y: f64, cx: f64, cy: f64, w: f64) -> f64 {
    (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * w * w)).exp()
}

/// Smooth spatial background mode: a broad Gaussian plus a low-frequency
/// cosine ripple.
fn spatial_mode(dims: Dims, rng: &mut ChaCha8Rng) -> Array1<f64> {
    let (nx, ny) = (dims.nx as f64, dims.ny as f64);
    let cx = rng.gen_range(0.3..0.7) * nx;
    let cy = rng.gen_range(0.3..0.7) * ny;
    let w = rng.gen_range(0.15..0.3) * nx.min(ny);
    let fx = rng.gen_range(0.5..1.5);
    let fy = rng.gen_range(0.5..1.5);
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    let ripple = rng.gen_range(0.1..0.3);
    Array1::from_shape_fn(dims.pixels(), |r| {
        let (x, y) = ((r % dims.nx) as f64, (r / dims.nx) as f64);
        let arg = std::f64::consts::TAU * (fx * x / nx + fy * y / ny) + phase;
        gaussian(x, y, cx, cy, w) * (1.0 + ripple * arg.cos())
    })
}

pub fn generate(spec: &PhantomSpec) -> Result<Vec<PhantomFrame>> {
    spec.validate()?;
    let dims = spec.dims;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let modes: Vec<Array1<f64>> = (0..spec.background_rank)
        .map(|_| spatial_mode(dims, &mut rng))
        .collect();
    // Mixing weights decay with mode index so the spectrum is well separated.
    let weights: Vec<Vec<f64>> = (0..spec.background_rank)
        .map(|k| {
            let scale = 1.0 / (1.0 + k as f64);
            (0..dims.nz).map(|_| scale * rng.gen_range(0.5..1.0)).collect()
        })
        .collect();
    let drift_dir: Vec<f64> = (0..spec.background_rank)
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();

    let margin = spec.margin();
    let travel = spec.travel();
    let blobs: Vec<Blob> = (0..spec.n_blobs + spec.n_static)
        .map(|i| {
            let direction = if i < spec.n_blobs {
                let angle = rng.gen_range(0.0..std::f64::consts::TAU);
                (angle.cos(), angle.sin())
            } else {
                (0.0, 0.0)
            };
            let lo = |n: usize, d: f64| margin + (-d * travel).max(0.0).min(n as f64);
            let hi = |n: usize, d: f64| n as f64 - 1.0 - margin - (d * travel).max(0.0);
            let pick = |rng: &mut ChaCha8Rng, n: usize, d: f64| {
                let (a, b) = (lo(n, d), hi(n, d));
                if b > a {
                    rng.gen_range(a..b)
                } else {
                    a
                }
            };
            let start = (
                pick(&mut rng, dims.nx, direction.0),
                pick(&mut rng, dims.ny, direction.1),
            );
            let home = rng.gen_range(0..dims.nz);
            let profile = (0..dims.nz)
                .map(|k| {
                    let a = if k == home { spec.blob_amplitude } else { 0.0 };
                    Complex64::from_polar(a, rng.gen_range(-0.3..0.3))
                })
                .collect();
            Blob {
                start,
                direction,
                profile,
            }
        })
        .collect();

    let noise = Normal::new(0.0, spec.noise_sigma / 2f64.sqrt()).expect("finite sigma");

    (0..spec.n_frames)
        .map(|t| {
            let mut low_rank: CMatrix = Array2::zeros(dims.casorati_shape().f());
            for (k, mode) in modes.iter().enumerate() {
                let gain = 1.0 + spec.drift * drift_dir[k] * t as f64;
                for (z, w) in weights[k].iter().enumerate() {
                    low_rank
                        .column_mut(z)
                        .zip_mut_with(mode, |o, m| *o += Complex64::new(m * w * gain, 0.0));
                }
            }

            let mut sparse: CMatrix = Array2::zeros(dims.casorati_shape().f());
            for blob in &blobs {
                let cx = blob.start.0 + blob.direction.0 * spec.motion_step * t as f64;
                let cy = blob.start.1 + blob.direction.1 * spec.motion_step * t as f64;
                for (z, amp) in blob.profile.iter().enumerate() {
                    if amp.norm() == 0.0 {
                        continue;
                    }
                    for (r, v) in sparse.column_mut(z).iter_mut().enumerate() {
                        let (x, y) = ((r % dims.nx) as f64, (r / dims.nx) as f64);
                        *v += amp * gaussian(x, y, cx, cy, spec.blob_width);
                    }
                }
            }

            let mut x = &low_rank + &sparse;
            if spec.noise_sigma > 0.0 {
                x.mapv_inplace(|v| v + Complex64::new(noise.sample(&mut rng), noise.sample(&mut rng)));
            }
            Ok(PhantomFrame {
                volume: DynamicVolume::new(x, dims)?,
                low_rank,
                sparse,
            })
        })
        .collect()
}
