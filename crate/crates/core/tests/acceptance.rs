//! Acceptance suite. Each criterion prints one PASS/FAIL line with the
//! measured numbers; the process exits nonzero if any criterion fails.
//!
//! Run with `cargo test --test acceptance`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lsrecon::harness::{run_sweep, run_sweep_to_dir, sweep_mask, ExperimentSpec, SolverId, Tier};
use lsrecon::metrics::psnr;
use lsrecon::operators::{acquire, extract_support, wavelet_forward, Acquisition, Wavelet2d};
use lsrecon::phantom::{generate, PhantomSpec};
use lsrecon::prox::soft_threshold;
use lsrecon::solvers::{solve_ls_observed, solve_priori_ls_observed, IterationState};
use lsrecon::volume::{frobenius, inner};
use lsrecon::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    Array2::from_shape_fn((rows, cols), |_| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

// ---------------------------------------------------------------- oracles

/// Minimizes ½|u − x|² + λ|u| by a shrinking polar grid search. Candidates
/// are compared through the objective difference written so that it does
/// not cancel near the optimum.
fn brute_force_prox(x: Complex64, lambda: f64) -> Complex64 {
    let delta = |u: Complex64, b: Complex64| {
        let d = u - b;
        let quad = 0.5 * (d * (u + b - x * 2.0).conj()).re;
        let sum = u.norm() + b.norm();
        let abs = if sum == 0.0 {
            0.0
        } else {
            (d * (u + b).conj()).re / sum
        };
        quad + lambda * abs
    };
    let mut best = c(0.0, 0.0);
    let (mut r_lo, mut r_hi) = (0.0, x.norm() + lambda);
    let (mut t_lo, mut t_hi) = (-std::f64::consts::PI, std::f64::consts::PI);
    for _ in 0..40 {
        let n = 40;
        for i in 0..=n {
            let r = r_lo + (r_hi - r_lo) * i as f64 / n as f64;
            for j in 0..=n {
                let u = Complex64::from_polar(r, t_lo + (t_hi - t_lo) * j as f64 / n as f64);
                if delta(u, best) < 0.0 {
                    best = u;
                }
            }
        }
        if best.norm() == 0.0 {
            // optimum may sit closer to 0 than one grid step: refine the
            // radius only, keeping every direction in play
            r_hi /= 4.0;
            continue;
        }
        let (r, t) = best.to_polar();
        let (dr, dt) = ((r_hi - r_lo) / 8.0, (t_hi - t_lo) / 8.0);
        r_lo = (r - dr).max(0.0);
        r_hi = r + dr;
        t_lo = t - dt;
        t_hi = t + dt;
    }
    best
}

/// Singular values by one-sided Jacobi: rotate column pairs until they are
/// mutually orthogonal, then read off the column norms.
fn jacobi_singular_values(m: &CMatrix) -> Vec<f64> {
    let mut a = m.clone();
    let n = a.ncols();
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = a.column(p).iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = a.column(q).iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = a
                    .column(p)
                    .iter()
                    .zip(a.column(q))
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                if gamma.norm() == 0.0 || alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                off = off.max(gamma.norm() / (alpha * beta).sqrt());
                // make the pair's inner product real, then rotate
                let phase = (gamma / gamma.norm()).conj();
                let zeta = (beta - alpha) / (2.0 * gamma.norm());
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for r in 0..a.nrows() {
                    let x = a[[r, p]];
                    let y = a[[r, q]] * phase;
                    a[[r, p]] = x * cs - y * sn;
                    a[[r, q]] = x * sn + y * cs;
                }
            }
        }
        if off < 1e-15 {
            break;
        }
    }
    let mut s: Vec<f64> = (0..n)
        .map(|j| a.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

fn spectral_distance(prev: &CMatrix, cur: &CMatrix) -> f64 {
    let a = jacobi_singular_values(prev);
    let b = jacobi_singular_values(cur);
    let num: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|x| x * x).sum();
    if den == 0.0 {
        // a vanished low-rank part has no spectrum to compare
        return f64::INFINITY;
    }
    (num / den).sqrt()
}

// ------------------------------------------------------------- criteria

type Check = std::result::Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_1() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_prox = 0.0f64;
    for _ in 0..1000 {
        let x = c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let lambda = rng.gen_range(0.0..5.0);
        worst_prox = worst_prox.max((soft_threshold(x, lambda) - brute_force_prox(x, lambda)).norm());
    }
    let mut worst_svt = 0.0f64;
    for _ in 0..100 {
        let m = random_matrix(&mut rng, 16, 4);
        let sigma = jacobi_singular_values(&m);
        let lambda = rng.gen_range(0.0..1.2) * sigma[0];
        let out = lsrecon::operators::sv_threshold(&m, lambda).map_err(|e| e.to_string())?;
        for (got, s) in jacobi_singular_values(&out).iter().zip(&sigma) {
            worst_svt = worst_svt.max((got - (s - lambda).max(0.0)).abs());
        }
    }
    ensure(
        worst_prox <= 1e-8 && worst_svt <= 1e-8,
        format!("prox max err {worst_prox:.2e} (1000 cases), SVT spectrum max err {worst_svt:.2e} (100 matrices), tol 1e-8"),
    )
}

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let dims = Dims::new(32, 32, 4).unwrap();
    let (mut adj, mut aah, mut pr, mut pars) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (k, rate) in [0.1, 1.0 / 7.0, 0.25, 0.5, 1.0].into_iter().enumerate() {
        let op = Acquisition::new(dims, common::mask(rate, 40 + k as u64)).map_err(|e| e.to_string())?;
        let m = op.mask().m();
        let x = random_matrix(&mut rng, 1024, 4);
        let y = random_matrix(&mut rng, m, 4);
        let ax = op.forward(&x).unwrap();
        let ahy = op.adjoint(&y).unwrap();
        let scale = frobenius(&x.view()) * frobenius(&y.view());
        adj = adj.max((inner(&y.view(), &ax.view()) - inner(&ahy.view(), &x.view())).norm() / scale);
        let back = op.forward(&ahy).unwrap();
        aah = aah.max(frobenius(&(&back - &y).view()) / frobenius(&y.view()));
    }
    let w = Wavelet2d::default();
    for _ in 0..5 {
        let x = random_matrix(&mut rng, 1024, 4);
        let wx = w.forward(&x, dims).unwrap();
        let xx = w.inverse(&wx, dims).unwrap();
        let nx = frobenius(&x.view());
        pr = pr.max(frobenius(&(&xx - &x).view()) / nx);
        pars = pars.max((frobenius(&wx.view()) - nx).abs() / nx);
    }
    ensure(
        adj <= 1e-10 && aah <= 1e-10 && pr <= 1e-10 && pars <= 1e-10,
        format!("adjoint {adj:.2e}, AAᴴ−I {aah:.2e}, wavelet reconstruction {pr:.2e}, Parseval {pars:.2e}, tol 1e-10"),
    )
}

fn trace(
    run: impl FnOnce(&mut dyn FnMut(&IterationState<'_>)) -> Result<SolveResult>,
) -> std::result::Result<(SolveResult, Vec<CMatrix>), String> {
    let mut xs = Vec::new();
    let r = run(&mut |st| {
        xs.push(st.low_rank.clone());
        xs.push(st.sparse.clone());
        xs.push(st.proxy.clone());
    })
    .map_err(|e| e.to_string())?;
    Ok((r, xs))
}

fn criterion_3() -> Check {
    let (_, frames) = common::phantom();
    let cfg = SolverConfig {
        lambda_p: 0.0,
        ..Default::default()
    };
    let mut worst = 0.0f64;
    let mut total_iters = 0;
    for (t, seed) in [(0, 1), (2, 2), (5, 3)] {
        let y = acquire(&frames[t].volume, &common::mask(0.5, seed)).unwrap();
        let (a, ta) = trace(|o| solve_ls_observed(&y, &cfg, o))?;
        let (b, tb) = trace(|o| solve_priori_ls_observed(&y, &Prior::empty(4), &cfg, o))?;
        if ta.len() != tb.len() || a.iterations != b.iterations {
            return Err(format!(
                "iteration counts differ: {} vs {}",
                a.iterations, b.iterations
            ));
        }
        for (p, q) in ta.iter().zip(&tb) {
            worst = worst.max(p.iter().zip(q).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max));
        }
        total_iters += a.iterations;
    }
    ensure(
        worst <= 1e-12,
        format!("max iterate difference {worst:.2e} over {total_iters} iterations (3 frames), tol 1e-12"),
    )
}

fn criterion_4() -> Check {
    let spec = PhantomSpec {
        background_rank: 1,
        n_blobs: 0,
        n_static: 0,
        noise_sigma: 0.0,
        ..Default::default()
    };
    let frame = &generate(&spec).map_err(|e| e.to_string())?[0];
    let y = acquire(&frame.volume, &SamplingMask::full(32, 32)).unwrap();
    let cfg = SolverConfig {
        lambda_l: Threshold::Absolute(1e-9),
        lambda_s: Threshold::Absolute(1e12),
        max_iter: 50,
        ..Default::default()
    };
    let r = solve_ls(&y, &cfg).map_err(|e| e.to_string())?;
    let est = r.decomposition.estimate_volume(spec.dims).unwrap();
    let p = psnr(&frame.volume, &est).unwrap();
    let s_max = r
        .decomposition
        .sparse()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    ensure(
        p > 100.0 && r.iterations <= 50 && r.converged,
        format!(
            "PSNR {p:.1} dB after {} iterations (converged {}), max|S| {s_max:.1e}",
            r.iterations, r.converged
        ),
    )
}

fn criterion_5() -> Check {
    let spec = ExperimentSpec::default();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let start = Instant::now();
    let out = pool.install(|| run_sweep(&spec)).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let mut parts = Vec::new();
    let mut ok = elapsed < Duration::from_secs(600);
    for &rate in &spec.rates {
        let ls = out.mean_psnr(SolverId::Ls, rate).unwrap();
        let pr = out.mean_psnr(SolverId::PrioriLs, rate).unwrap();
        ok &= pr >= ls;
        if rate == spec.rates[0] {
            ok &= pr - ls >= 0.5;
        }
        parts.push(format!(
            "1/{:.0}: ls {ls:.2} / priori {pr:.2} ({:+.2} dB)",
            1.0 / rate,
            pr - ls
        ));
    }
    ensure(
        ok,
        format!(
            "{}; {:.1}s single-threaded",
            parts.join(", "),
            elapsed.as_secs_f64()
        ),
    )
}

struct SequenceRuns {
    /// Every solve of criterion 6's sequences plus the per-frame baselines.
    results: Vec<SolveResult>,
    worst_support_change: f64,
    worst_spectral_distance: f64,
}

fn sequence_runs() -> std::result::Result<SequenceRuns, String> {
    let spec = ExperimentSpec::default();
    let frames = generate(&spec.phantom).map_err(|e| e.to_string())?;
    let dims = spec.dims();
    let mut results = Vec::new();
    let (mut worst_support_change, mut worst_spectral_distance) = (0.0f64, 0.0f64);
    for &rate in &spec.rates {
        for seed in 0..spec.n_seeds {
            let first = sweep_mask(&spec, seed, Tier::First, spec.first_frame_rate).unwrap();
            let rest = sweep_mask(&spec, seed, Tier::Rest, rate).unwrap();
            let ys = common::two_tier(&frames, &first, &rest);
            let seq = solve_sequence(&ys, &spec.ls, &spec.priori).map_err(|e| e.to_string())?;
            let supports: Vec<SupportSet> = seq
                .iter()
                .map(|r| {
                    let s = DynamicVolume::new(r.decomposition.sparse().clone(), dims).unwrap();
                    extract_support(&wavelet_forward(&s).unwrap(), spec.priori.support_eps)
                })
                .collect();
            for t in 1..seq.len() {
                worst_support_change = worst_support_change.max(supports[t].change_ratio(&supports[t - 1]));
                worst_spectral_distance = worst_spectral_distance.max(spectral_distance(
                    seq[t - 1].decomposition.low_rank(),
                    seq[t].decomposition.low_rank(),
                ));
            }
            results.extend(seq);
            for y in &ys[1..] {
                results.push(solve_ls(y, &spec.ls).map_err(|e| e.to_string())?);
            }
        }
    }
    Ok(SequenceRuns {
        results,
        worst_support_change,
        worst_spectral_distance,
    })
}

fn criterion_6(runs: &SequenceRuns) -> Check {
    ensure(
        runs.worst_support_change < 0.15 && runs.worst_spectral_distance < 0.1,
        format!(
            "worst adjacent support change {:.1}% (< 15%), worst spectral distance {:.2e} (< 0.1), 3 rates x 5 seeds x 5 frame pairs",
            100.0 * runs.worst_support_change,
            runs.worst_spectral_distance
        ),
    )
}

fn criterion_7() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut bytes = Vec::new();
    for (run, threads) in [("a", 1), ("b", 0)] {
        let spec = ExperimentSpec {
            output_dir: dir.path().join(run),
            ..Default::default()
        };
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| run_sweep_to_dir(&spec))
            .map_err(|e| e.to_string())?;
        bytes.push(std::fs::read(spec.output_dir.join("sweep.csv")).map_err(|e| e.to_string())?);
    }
    ensure(
        !bytes[0].is_empty() && bytes[0] == bytes[1],
        format!(
            "sweep.csv {} bytes, serial and parallel runs identical: {}",
            bytes[0].len(),
            bytes[0] == bytes[1]
        ),
    )
}

fn criterion_8(runs: &SequenceRuns) -> Check {
    let tol = SolverConfig::default().tol;
    let converged = runs.results.iter().filter(|r| r.converged).count();
    // written so that a NaN final change counts as a violation
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    let bad_final = runs
        .results
        .iter()
        .filter(|r| r.converged && !(*r.residual_history.last().unwrap() < tol))
        .count();
    let non_finite = runs
        .results
        .iter()
        .filter(|r| r.residual_history.iter().any(|v| !v.is_finite()))
        .count();
    let worst_final = runs
        .results
        .iter()
        .filter(|r| r.converged)
        .map(|r| *r.residual_history.last().unwrap())
        .fold(0.0, f64::max);
    ensure(
        bad_final == 0 && non_finite == 0 && converged > 0,
        format!(
            "{converged}/{} runs converged, worst final change {worst_final:.4e} (< 1e-3), {non_finite} non-finite histories",
            runs.results.len()
        ),
    )
}

fn report(n: usize, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into()))
    });
    let elapsed = start.elapsed();
    let outcome = match (outcome, limit) {
        (Ok(d), Some(l)) if elapsed > l => Err(format!(
            "{d}; took {:.1}s, limit {}s",
            elapsed.as_secs_f64(),
            l.as_secs()
        )),
        (o, _) => o,
    };
    let (tag, detail) = match &outcome {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!(
        "{tag} criterion {n} ({name}): {detail} [{:.2}s]",
        elapsed.as_secs_f64()
    );
    outcome.is_ok()
}

fn main() {
    let secs = Duration::from_secs;
    let mut ok = true;
    ok &= report(1, "prox oracles", Some(secs(10)), criterion_1);
    ok &= report(2, "operator algebra", Some(secs(10)), criterion_2);
    ok &= report(3, "reduction regression", Some(secs(30)), criterion_3);
    ok &= report(4, "exact-regime recovery", None, criterion_4);
    ok &= report(5, "PSNR vs sampling rate", Some(secs(600)), criterion_5);
    let runs = sequence_runs();
    let with_runs = |f: fn(&SequenceRuns) -> Check| {
        let runs = &runs;
        move || runs.as_ref().map_err(|e| e.clone()).and_then(f)
    };
    ok &= report(6, "prior validity", None, with_runs(criterion_6));
    ok &= report(7, "sweep determinism", None, criterion_7);
    ok &= report(8, "convergence bookkeeping", None, with_runs(criterion_8));
    if !ok {
        std::process::exit(1);
    }
}
