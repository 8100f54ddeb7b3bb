//! Variable-density masks: print one, then the sampled fraction by radius.

use lsrecon::operators::{make_mask, DEFAULT_DENSITY_FALLOFF};

fn main() {
    let mask = make_mask(32, 32, 0.25, DEFAULT_DENSITY_FALLOFF, 7).unwrap();
    println!("m = {} of {} (rate {:.3})", mask.m(), 32 * 32, mask.rate());
    let p = mask.pattern();
    for j in 0..32 {
        let row: String = (0..32).map(|i| if p[[i, j]] { '#' } else { '.' }).collect();
        println!("{row}");
    }

    let mut hit = [0usize; 5];
    let mut all = [0usize; 5];
    for j in 0..32 {
        for i in 0..32 {
            let band = ((mask.distance_from_center(i, j) / 5.0) as usize).min(4);
            all[band] += 1;
            hit[band] += p[[i, j]] as usize;
        }
    }
    for b in 0..5 {
        println!("radius {:>2}..: {:.2}", 5 * b, hit[b] as f64 / all[b] as f64);
    }
}
