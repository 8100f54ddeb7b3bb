//! Singular value thresholding of a noisy rank-2 Casorati matrix, and the
//! pull of a spectrum toward a previous one.

use lsrecon::operators::spectral::step_toward_prior;
use lsrecon::operators::{sv_threshold, svd};
use lsrecon::CMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let noise = Normal::new(0.0, 0.05).unwrap();
    let m = CMatrix::from_shape_fn((64, 6), |(i, j)| {
        let a = (i as f64 / 10.0).sin() * (1.0 + j as f64);
        let b = (i as f64 / 4.0).cos() * (j as f64 - 2.5);
        Complex64::new(a + b + noise.sample(&mut rng), noise.sample(&mut rng))
    });

    let before = svd(&m).unwrap();
    println!("sigma        {:.3?}", before.sigma);
    let low = sv_threshold(&m, 1.0).unwrap();
    let after = svd(&low).unwrap();
    println!("after SVT(1) {:.3?}  rank {}", after.sigma, after.rank(1e-12));

    let prev = vec![12.0, 6.0, 0.0, 0.0, 0.0, 0.0];
    let (pulled, clamped) = step_toward_prior(&after.sigma, &prev, 0.5);
    println!("toward prev  {pulled:.3?}  clamped {clamped}");
}
