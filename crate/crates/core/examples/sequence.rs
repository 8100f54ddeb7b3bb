//! A moving phantom reconstructed frame by frame, once independently and
//! once with each frame seeded by its predecessor.

use lsrecon::metrics::psnr;
use lsrecon::operators::{acquire, make_mask, DEFAULT_DENSITY_FALLOFF};
use lsrecon::phantom::{generate, PhantomSpec};
use lsrecon::{solve_ls, solve_sequence, SolverConfig};

fn main() {
    let spec = PhantomSpec::default();
    let frames = generate(&spec).unwrap();
    let (nx, ny) = (spec.dims.nx, spec.dims.ny);
    let first = make_mask(nx, ny, 0.5, DEFAULT_DENSITY_FALLOFF, 1).unwrap();
    let rest = make_mask(nx, ny, 1.0 / 7.0, DEFAULT_DENSITY_FALLOFF, 2).unwrap();

    let ys: Vec<_> = frames
        .iter()
        .enumerate()
        .map(|(t, f)| acquire(&f.volume, if t == 0 { &first } else { &rest }).unwrap())
        .collect();
    let cfg = SolverConfig::default();
    let seq = solve_sequence(&ys, &cfg, &cfg).unwrap();

    println!("frame    ls   priori");
    for (t, (f, y)) in frames.iter().zip(&ys).enumerate() {
        let base = solve_ls(y, &cfg)
            .unwrap()
            .decomposition
            .estimate_volume(spec.dims)
            .unwrap();
        let pri = seq[t].decomposition.estimate_volume(spec.dims).unwrap();
        println!(
            "{:>5} {:>6.2} {:>7.2}",
            t + 1,
            psnr(&f.volume, &base).unwrap(),
            psnr(&f.volume, &pri).unwrap()
        );
    }
}
