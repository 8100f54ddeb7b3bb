//! Soft thresholding on complex values, and the restricted variant that
//! leaves a chosen support untouched.

use lsrecon::prox::{soft_threshold, soft_threshold_restricted};
use lsrecon::SupportSet;
use ndarray::array;
use num_complex::Complex64;

fn main() {
    for z in [
        Complex64::new(3.0, 4.0),
        Complex64::new(0.3, -0.1),
        Complex64::new(0.0, 0.0),
    ] {
        println!("shrink({z}, 1) = {}", soft_threshold(z, 1.0));
    }

    let m = array![
        [Complex64::new(2.0, 0.0), Complex64::new(0.5, 0.5)],
        [Complex64::new(0.0, -3.0), Complex64::new(0.2, 0.0)]
    ];
    let mut keep = SupportSet::new();
    keep.insert(1, 1);
    let out = soft_threshold_restricted(&m.view(), 1.0, &keep).unwrap();
    println!("restricted (entry (1,1) kept):\n{out}");
}
