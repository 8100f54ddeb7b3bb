#![allow(dead_code)]

use lsrecon::operators::{acquire, make_mask, DEFAULT_DENSITY_FALLOFF};
use lsrecon::phantom::{generate, PhantomFrame, PhantomSpec};
use lsrecon::{DynamicVolume, KSpaceData, SamplingMask};

pub fn phantom() -> (PhantomSpec, Vec<PhantomFrame>) {
    let spec = PhantomSpec::default();
    let frames = generate(&spec).unwrap();
    (spec, frames)
}

pub fn mask(rate: f64, seed: u64) -> SamplingMask {
    make_mask(32, 32, rate, DEFAULT_DENSITY_FALLOFF, seed).unwrap()
}

pub fn truth(frame: &PhantomFrame) -> DynamicVolume {
    DynamicVolume::new(&frame.low_rank + &frame.sparse, frame.volume.dims()).unwrap()
}

/// First frame at `first`, the rest at `rest`, as in the two-tier protocol.
pub fn two_tier(frames: &[PhantomFrame], first: &SamplingMask, rest: &SamplingMask) -> Vec<KSpaceData> {
    frames
        .iter()
        .enumerate()
        .map(|(t, f)| acquire(&f.volume, if t == 0 { first } else { rest }).unwrap())
        .collect()
}
