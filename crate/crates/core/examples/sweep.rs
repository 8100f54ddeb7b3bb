//! A reduced comparison grid, printed as CSV.

use lsrecon::harness::{run_sweep, summary_csv, ExperimentSpec};

fn main() {
    let mut spec = ExperimentSpec {
        n_seeds: 2,
        ..Default::default()
    };
    spec.apply_override("sweep.rates=1/7,1/3").unwrap();
    spec.validate().unwrap();
    let out = run_sweep(&spec).unwrap();
    print!("{}", summary_csv(&out.summary));
}
