//! Dot-product test for the undersampled Fourier operator:
//! `<A x, y> = <x, Aᴴ y>`, and `A Aᴴ = I` on the sampled set.

use lsrecon::operators::{make_mask, Acquisition};
use lsrecon::volume::{frobenius, inner};
use lsrecon::{CMatrix, Dims};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_shape_fn((rows, cols), |_| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn main() {
    let dims = Dims::new(24, 16, 3).unwrap();
    let mask = make_mask(24, 16, 0.3, 4.0, 1).unwrap();
    let op = Acquisition::new(dims, mask.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    let x = random(dims.pixels(), dims.nz, &mut rng);
    let y = random(mask.m(), dims.nz, &mut rng);
    let lhs = inner(&op.forward(&x).unwrap().view(), &y.view());
    let rhs = inner(&x.view(), &op.adjoint(&y).unwrap().view());
    println!("<Ax,y>   = {lhs:.12}");
    println!("<x,Aᴴy>  = {rhs:.12}");
    println!("|diff|   = {:.2e}", (lhs - rhs).norm());

    let back = op.forward(&op.adjoint(&y).unwrap()).unwrap();
    println!("‖AAᴴy − y‖ = {:.2e}", frobenius(&(&back - &y).view()));
}
