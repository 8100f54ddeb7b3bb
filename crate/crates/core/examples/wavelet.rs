//! Three-level Daubechies-4 transform of a smooth slice with one sharp
//! feature: perfect reconstruction, energy preservation, compressibility.

use lsrecon::operators::{wavelet_forward, wavelet_inverse};
use lsrecon::volume::frobenius;
use lsrecon::{CMatrix, Dims, DynamicVolume};
use num_complex::Complex64;

fn main() {
    let dims = Dims::new(32, 32, 1).unwrap();
    let data = CMatrix::from_shape_fn((dims.pixels(), 1), |(p, _)| {
        let (ix, iy) = ((p % 32) as f64, (p / 32) as f64);
        let smooth = (ix / 6.0).sin() * (iy / 9.0).cos();
        let spot = if (ix - 20.0).abs() < 2.0 && (iy - 11.0).abs() < 2.0 {
            1.0
        } else {
            0.0
        };
        Complex64::new(smooth + spot, 0.0)
    });
    let x = DynamicVolume::new(data, dims).unwrap();

    let w = wavelet_forward(&x).unwrap();
    let back = wavelet_inverse(&w, dims).unwrap();
    println!(
        "reconstruction error {:.2e}",
        frobenius(&(back.data() - x.data()).view())
    );
    println!(
        "energy: image {:.6}  coefficients {:.6}",
        x.frobenius_norm(),
        frobenius(&w.view())
    );

    let mut mags: Vec<f64> = w.iter().map(|z| z.norm_sqr()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = mags.iter().sum();
    for frac in [0.02, 0.05, 0.1, 0.2] {
        let k = (frac * mags.len() as f64) as usize;
        let kept: f64 = mags[..k].iter().sum();
        println!(
            "top {:>4.0}% of coefficients hold {:.4} of the energy",
            100.0 * frac,
            kept / total
        );
    }
}
