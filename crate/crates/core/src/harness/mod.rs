//! Experiment configuration and the sampling-rate sweep.

pub mod config;
pub mod sweep;

pub use config::{parse_rate, ExperimentSpec, SolverId};
pub use sweep::{
    mask_seed, run_sweep, run_sweep_to_dir, summary_csv, sweep_csv, sweep_mask, SummaryRow, SweepOutcome,
    SweepRow, Tier,
};
