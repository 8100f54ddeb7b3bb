//! The rate × seed × solver grid behind `sweep`.
//!
//! Every sequence is sampled in two tiers: the first frame at
//! `first_frame_rate` and every later frame at the swept rate. Masks are
//! drawn afresh for each (seed, tier) pair, so the means average over mask
//! realizations, and the first-frame mask of a seed is shared by all rates
//! and solvers to keep comparisons paired.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use log::{error, info};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metrics::psnr;
use crate::operators::fourier::{acquire, KSpaceData};
use crate::operators::mask::{make_mask, SamplingMask};
use crate::phantom::{generate, PhantomFrame};
use crate::solvers::{prior_from_result, solve_ls, solve_priori_ls, SolveResult};
use crate::volume::DynamicVolume;

use super::config::{ExperimentSpec, SolverId};

/// One reconstructed frame of one sweep cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub solver: SolverId,
    pub rate: f64,
    pub seed: usize,
    /// Counted from 1.
    pub frame: usize,
    pub psnr: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Kept out of the CSV so reruns stay byte-identical.
    pub wall_time_s: f64,
}

/// Mean PSNR over frames 2.. for one (solver, rate).
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub solver: SolverId,
    pub rate: f64,
    pub mean_psnr: f64,
    pub frames: usize,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub summary: Vec<SummaryRow>,
}

impl SweepOutcome {
    pub fn mean_psnr(&self, solver: SolverId, rate: f64) -> Option<f64> {
        self.summary
            .iter()
            .find(|r| r.solver == solver && r.rate == rate)
            .map(|r| r.mean_psnr)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    First,
    Rest,
}

/// Seed of the mask used by mask realization `seed` in `tier`.
pub fn mask_seed(spec: &ExperimentSpec, seed: usize, tier: Tier) -> u64 {
    let t = match tier {
        Tier::First => 1,
        Tier::Rest => 2,
    };
    spec.mask_seed.wrapping_add(1000 * seed as u64 + t)
}

pub fn sweep_mask(spec: &ExperimentSpec, seed: usize, tier: Tier, rate: f64) -> Result<SamplingMask> {
    let d = spec.dims();
    make_mask(
        d.nx,
        d.ny,
        rate,
        spec.density_falloff,
        mask_seed(spec, seed, tier),
    )
}

fn truth(frame: &PhantomFrame) -> Result<DynamicVolume> {
    DynamicVolume::new(&frame.low_rank + &frame.sparse, frame.volume.dims())
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed().as_secs_f64()))
}

struct Prepared {
    truths: Vec<DynamicVolume>,
    frames: Vec<PhantomFrame>,
}

fn row(
    solver: SolverId,
    rate: f64,
    seed: usize,
    t: usize,
    reference: &DynamicVolume,
    result: &SolveResult,
    wall: f64,
) -> Result<SweepRow> {
    let estimate = result.decomposition.estimate_volume(reference.dims())?;
    Ok(SweepRow {
        solver,
        rate,
        seed,
        frame: t + 1,
        psnr: psnr(reference, &estimate)?,
        iterations: result.iterations,
        converged: result.converged,
        wall_time_s: wall,
    })
}

/// Frames 2.. of one (solver, rate, seed) cell, continuing from the shared
/// first-frame result.
fn run_cell(
    spec: &ExperimentSpec,
    data: &Prepared,
    first: &SolveResult,
    solver: SolverId,
    rate: f64,
    seed: usize,
) -> Result<Vec<SweepRow>> {
    let mask = sweep_mask(spec, seed, Tier::Rest, rate)?;
    let dims = spec.dims();
    let mut rows = Vec::with_capacity(data.frames.len().saturating_sub(1));
    let mut prev: Option<SolveResult> = None;
    for t in 1..data.frames.len() {
        let wrap = |e: Error| Error::Frame {
            frame: t,
            source: Box::new(e),
        };
        let y = acquire(&data.frames[t].volume, &mask).map_err(wrap)?;
        let (result, wall) = match solver {
            SolverId::Ls => timed(|| solve_ls(&y, &spec.ls)),
            SolverId::PrioriLs => timed(|| {
                let prior = prior_from_result(prev.as_ref().unwrap_or(first), dims, spec.priori.support_eps)?;
                solve_priori_ls(&y, &prior, &spec.priori)
            }),
        }
        .map_err(wrap)?;
        rows.push(row(solver, rate, seed, t, &data.truths[t], &result, wall)?);
        prev = Some(result);
    }
    Ok(rows)
}

fn first_frame(spec: &ExperimentSpec, data: &Prepared, seed: usize) -> Result<(SolveResult, f64)> {
    let mask = sweep_mask(spec, seed, Tier::First, spec.first_frame_rate)?;
    let y: KSpaceData = acquire(&data.frames[0].volume, &mask)?;
    timed(|| solve_ls(&y, &spec.ls)).map_err(|e| Error::Frame {
        frame: 0,
        source: Box::new(e),
    })
}

/// Runs the whole grid. Cells run on the current rayon pool; the returned
/// rows are sorted by (solver, rate, seed, frame) whatever the schedule.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<SweepOutcome> {
    spec.validate()?;
    let frames = generate(&spec.phantom)?;
    let truths = frames.iter().map(truth).collect::<Result<Vec<_>>>()?;
    let data = Prepared { truths, frames };

    let firsts: Vec<(SolveResult, f64)> = (0..spec.n_seeds)
        .into_par_iter()
        .map(|seed| {
            first_frame(spec, &data, seed).inspect_err(|e| error!("seed {seed}, first frame failed: {e}"))
        })
        .collect::<Result<_>>()?;

    let cells: Vec<(SolverId, f64, usize)> = spec
        .solvers
        .iter()
        .flat_map(|&s| {
            spec.rates
                .iter()
                .flat_map(move |&r| (0..spec.n_seeds).map(move |k| (s, r, k)))
        })
        .collect();
    let per_cell: Vec<Vec<SweepRow>> = cells
        .par_iter()
        .map(|&(solver, rate, seed)| {
            run_cell(spec, &data, &firsts[seed].0, solver, rate, seed)
                .inspect_err(|e| error!("{solver} at rate {rate:.6}, seed {seed} failed: {e}"))
        })
        .collect::<Result<_>>()?;

    let mut rows: Vec<SweepRow> = per_cell.into_iter().flatten().collect();
    for &solver in &spec.solvers {
        for (seed, (result, wall)) in firsts.iter().enumerate() {
            rows.push(row(
                solver,
                spec.first_frame_rate,
                seed,
                0,
                &data.truths[0],
                result,
                *wall,
            )?);
        }
    }
    rows.sort_by(|a, b| {
        a.solver
            .cmp(&b.solver)
            .then(a.rate.total_cmp(&b.rate))
            .then((a.seed, a.frame).cmp(&(b.seed, b.frame)))
    });

    let summary = spec
        .solvers
        .iter()
        .flat_map(|&solver| spec.rates.iter().map(move |&rate| (solver, rate)))
        .map(|(solver, rate)| {
            let psnrs: Vec<f64> = rows
                .iter()
                .filter(|r| r.solver == solver && r.rate == rate && r.frame >= 2)
                .map(|r| r.psnr)
                .collect();
            SummaryRow {
                solver,
                rate,
                mean_psnr: psnrs.iter().sum::<f64>() / psnrs.len().max(1) as f64,
                frames: psnrs.len(),
            }
        })
        .collect();
    Ok(SweepOutcome { rows, summary })
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("solver,rate,seed,frame,psnr_db,iterations,converged\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.6},{},{},{:.6},{},{}",
            r.solver, r.rate, r.seed, r.frame, r.psnr, r.iterations, r.converged
        );
    }
    out
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("solver,rate,mean_psnr_db,frames\n");
    for r in rows {
        let _ = writeln!(out, "{},{:.6},{:.6},{}", r.solver, r.rate, r.mean_psnr, r.frames);
    }
    out
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Runs the sweep and writes `sweep.csv`, `summary.csv` and `run.log`
/// into `spec.output_dir`. Only `run.log` carries timestamps.
pub fn run_sweep_to_dir(spec: &ExperimentSpec) -> Result<SweepOutcome> {
    spec.validate()?;
    let dir = spec.output_dir.as_path();
    fs::create_dir_all(dir)?;
    let started = unix_now();
    let clock = Instant::now();
    info!(
        "sweep: {} solver(s) x {} rate(s) x {} seed(s) into {}",
        spec.solvers.len(),
        spec.rates.len(),
        spec.n_seeds,
        dir.display()
    );
    let outcome = run_sweep(spec)?;
    write_file(dir, "sweep.csv", &sweep_csv(&outcome.rows))?;
    write_file(dir, "summary.csv", &summary_csv(&outcome.summary))?;

    let mut log = format!("started_unix={started:.3}\n");
    for r in &outcome.rows {
        let _ = writeln!(
            log,
            "{} rate={:.6} seed={} frame={} wall_s={:.6}",
            r.solver, r.rate, r.seed, r.frame, r.wall_time_s
        );
    }
    let _ = writeln!(
        log,
        "finished_unix={:.3} elapsed_s={:.3}",
        unix_now(),
        clock.elapsed().as_secs_f64()
    );
    write_file(dir, "run.log", &log)?;
    Ok(outcome)
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<()> {
    fs::write(dir.join(name), body)?;
    Ok(())
}
