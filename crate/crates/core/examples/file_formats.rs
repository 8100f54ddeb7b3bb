//! Volume and mask files: write, read back, compare.

use lsrecon::io::{load_mask, load_volume, save_mask, save_volume};
use lsrecon::operators::make_mask;
use lsrecon::phantom::{generate, PhantomSpec};

fn main() {
    let dir = std::env::temp_dir().join(format!("lsrecon-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();

    let frame = &generate(&PhantomSpec::default()).unwrap()[0];
    let mask = make_mask(32, 32, 0.2, 4.0, 9).unwrap();
    save_volume(dir.join("x.lpsv"), &frame.volume).unwrap();
    save_mask(dir.join("m.lpsm"), &mask).unwrap();

    let v = load_volume(dir.join("x.lpsv")).unwrap();
    let m = load_mask(dir.join("m.lpsm")).unwrap();
    println!("volume {} round trip exact: {}", v.dims(), v == frame.volume);
    println!("mask {:?} round trip exact: {}", m.shape(), m == mask);
    for name in ["x.lpsv", "m.lpsm"] {
        println!(
            "{name}: {} bytes",
            std::fs::metadata(dir.join(name)).unwrap().len()
        );
    }
    std::fs::remove_dir_all(&dir).unwrap();
}
