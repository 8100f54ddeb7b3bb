use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use lsrecon::harness::{parse_rate, run_sweep_to_dir, ExperimentSpec, SolverId};
use lsrecon::io::{load_mask, load_volume, save_mask, save_volume};
use lsrecon::metrics::psnr;
use lsrecon::operators::{acquire, make_mask, Wavelet2d};
use lsrecon::phantom::generate;
use lsrecon::solvers::prior_from_parts;
use lsrecon::{solve_ls, solve_priori_ls, solve_sequence, DynamicVolume, Error, SolveResult};

#[derive(Parser)]
#[command(
    name = "lsrecon",
    version,
    about = "Low-rank plus sparse reconstruction experiments"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Default)]
struct ConfigArgs {
    /// Config file with [phantom], [solver.ls], [solver.priori], [sweep].
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Override one setting, e.g. --set solver.priori.lambda_p=0.3
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Synthetic sequences.
    Phantom {
        #[command(subcommand)]
        cmd: PhantomCmd,
    },
    /// Sampling masks.
    Mask {
        #[command(subcommand)]
        cmd: MaskCmd,
    },
    /// Reconstruct one volume from its undersampled k-space.
    Recon {
        #[arg(long)]
        volume: PathBuf,
        #[arg(long)]
        mask: PathBuf,
        /// Prefix of a previous reconstruction (reads PREFIX.l and PREFIX.s).
        #[arg(long)]
        prior: Option<PathBuf>,
        /// Defaults to priori-ls when --prior is given, ls otherwise.
        #[arg(long)]
        solver: Option<String>,
        /// Reference for the PSNR column; defaults to --volume.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Frame number reported in the CSV row.
        #[arg(long, default_value_t = 1)]
        frame: usize,
        /// Writes PREFIX.x, PREFIX.l and PREFIX.s.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Reconstruct a sequence, frame by frame.
    ReconSeq {
        /// Fully sampled frames, in order.
        #[arg(long, num_args = 1.., required = true)]
        frames: Vec<PathBuf>,
        /// Mask of the first frame.
        #[arg(long)]
        first_mask: PathBuf,
        /// Mask of every later frame.
        #[arg(long)]
        mask: PathBuf,
        #[arg(long, default_value = "priori-ls")]
        solver: String,
        /// Directory receiving frame_NNN.{x,l,s}.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// PSNR vs sampling rate over the rate × seed × solver grid.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Comma-separated, fractions allowed: 1/7,1/5,1/3
        #[arg(long)]
        rates: Option<String>,
        #[arg(long)]
        solvers: Option<String>,
        #[arg(long)]
        n_seeds: Option<usize>,
        /// Worker threads; 1 runs the grid serially.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// PSNR of ESTIMATE against REFERENCE.
    Eval { reference: PathBuf, estimate: PathBuf },
}

#[derive(Subcommand)]
enum PhantomCmd {
    /// Write frame_NNN.x (data), .l and .s (ground truth) into a directory.
    Gen {
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

#[derive(Subcommand)]
enum MaskCmd {
    /// Variable-density random mask.
    Gen {
        #[arg(long)]
        nx: usize,
        #[arg(long)]
        ny: usize,
        /// Fraction of k-space kept, e.g. 0.25 or 1/7.
        #[arg(long)]
        rate: String,
        #[arg(long, default_value_t = lsrecon::operators::mask::DEFAULT_DENSITY_FALLOFF)]
        falloff: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

type Outcome = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn load_spec(args: &ConfigArgs) -> Result<ExperimentSpec, Failure> {
    let mut spec = match &args.config {
        Some(p) => ExperimentSpec::load(p).map_err(|e| usage(e.to_string()))?,
        None => ExperimentSpec::default(),
    };
    for o in &args.overrides {
        spec.apply_override(o).map_err(|e| usage(e.to_string()))?;
    }
    Ok(spec)
}

fn parse_solver(s: &str) -> Result<SolverId, Failure> {
    s.parse().map_err(|e: Error| usage(e.to_string()))
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn save_result(prefix: &Path, result: &SolveResult, v: &DynamicVolume) -> lsrecon::Result<()> {
    let dims = v.dims();
    let (l, s) = (result.decomposition.low_rank(), result.decomposition.sparse());
    save_volume(
        with_ext(prefix, "x"),
        &result.decomposition.estimate_volume(dims)?,
    )?;
    save_volume(with_ext(prefix, "l"), &DynamicVolume::new(l.clone(), dims)?)?;
    save_volume(with_ext(prefix, "s"), &DynamicVolume::new(s.clone(), dims)?)?;
    Ok(())
}

const ROW_HEADER: &str = "frame,iterations,converged,data_residual,psnr";

fn print_row(frame: usize, r: &SolveResult, reference: &DynamicVolume) -> lsrecon::Result<()> {
    let p = psnr(reference, &r.decomposition.estimate_volume(reference.dims())?)?;
    println!(
        "{frame},{},{},{:.6},{:.6}",
        r.iterations, r.converged, r.data_residual, p
    );
    Ok(())
}

fn check_grid(v: &DynamicVolume, mask: &lsrecon::SamplingMask) -> Result<(), Failure> {
    let d = v.dims();
    if mask.shape() != (d.nx, d.ny) {
        return Err(usage(format!(
            "mask is {}x{} but the volume is {d}",
            mask.shape().0,
            mask.shape().1
        )));
    }
    Wavelet2d::default()
        .check_dims(d)
        .map_err(|e| usage(e.to_string()))
}

fn frame_err(frame: usize) -> impl Fn(Error) -> Failure {
    move |e| match e {
        Error::Frame { .. } => Failure::Run(e),
        e => Failure::Run(Error::Frame {
            frame,
            source: Box::new(e),
        }),
    }
}

fn phantom_gen(out: &Path, config: &ConfigArgs) -> Outcome {
    let spec = load_spec(config)?;
    spec.phantom.validate().map_err(|e| usage(e.to_string()))?;
    std::fs::create_dir_all(out).map_err(Error::from)?;
    let dims = spec.phantom.dims;
    for (t, f) in generate(&spec.phantom)?.iter().enumerate() {
        let prefix = out.join(format!("frame_{:03}", t + 1));
        save_volume(with_ext(&prefix, "x"), &f.volume)?;
        save_volume(
            with_ext(&prefix, "l"),
            &DynamicVolume::new(f.low_rank.clone(), dims)?,
        )?;
        save_volume(
            with_ext(&prefix, "s"),
            &DynamicVolume::new(f.sparse.clone(), dims)?,
        )?;
    }
    info!(
        "wrote {} frames of {dims} to {}",
        spec.phantom.n_frames,
        out.display()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn recon(
    volume: &Path,
    mask: &Path,
    prior: Option<&Path>,
    solver: Option<&str>,
    reference: Option<&Path>,
    frame: usize,
    out: Option<&Path>,
    config: &ConfigArgs,
) -> Outcome {
    let spec = load_spec(config)?;
    let solver = match (solver.map(parse_solver).transpose()?, prior) {
        (Some(SolverId::Ls), Some(_)) => return Err(usage("--prior makes no sense with --solver ls")),
        (Some(SolverId::PrioriLs), None) => return Err(usage("--solver priori-ls needs --prior")),
        (Some(s), _) => s,
        (None, Some(_)) => SolverId::PrioriLs,
        (None, None) => SolverId::Ls,
    };
    let v = load_volume(volume)?;
    let m = load_mask(mask)?;
    check_grid(&v, &m)?;
    let reference = match reference {
        Some(p) => load_volume(p)?,
        None => v.clone(),
    };
    let fail = frame_err(frame.saturating_sub(1));
    let y = acquire(&v, &m).map_err(&fail)?;
    let result = match solver {
        SolverId::Ls => solve_ls(&y, &spec.ls).map_err(&fail)?,
        SolverId::PrioriLs => {
            let p = prior.expect("checked above");
            let l = load_volume(with_ext(p, "l"))?;
            let s = load_volume(with_ext(p, "s"))?;
            if l.dims() != v.dims() || s.dims() != v.dims() {
                return Err(usage(format!(
                    "prior {} does not match volume dims {}",
                    p.display(),
                    v.dims()
                )));
            }
            let prior = prior_from_parts(l.data(), s.data(), v.dims(), spec.priori.support_eps)?;
            solve_priori_ls(&y, &prior, &spec.priori).map_err(&fail)?
        }
    };
    println!("{ROW_HEADER}");
    print_row(frame, &result, &reference)?;
    if let Some(prefix) = out {
        if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(Error::from)?;
        }
        save_result(prefix, &result, &v)?;
    }
    Ok(())
}

fn recon_seq(
    frames: &[PathBuf],
    first_mask: &Path,
    mask: &Path,
    solver: &str,
    out: Option<&Path>,
    config: &ConfigArgs,
) -> Outcome {
    let spec = load_spec(config)?;
    let solver = parse_solver(solver)?;
    let m1 = load_mask(first_mask)?;
    let m2 = load_mask(mask)?;
    let vols = frames
        .iter()
        .map(load_volume)
        .collect::<lsrecon::Result<Vec<_>>>()?;
    for (t, v) in vols.iter().enumerate() {
        if v.dims() != vols[0].dims() {
            return Err(usage(format!(
                "frame {} is {} but frame 1 is {}",
                t + 1,
                v.dims(),
                vols[0].dims()
            )));
        }
        check_grid(v, if t == 0 { &m1 } else { &m2 })?;
    }
    let ys = vols
        .iter()
        .enumerate()
        .map(|(t, v)| acquire(v, if t == 0 { &m1 } else { &m2 }).map_err(frame_err(t)))
        .collect::<Result<Vec<_>, _>>()?;

    let results = match solver {
        SolverId::Ls => ys
            .iter()
            .enumerate()
            .map(|(t, y)| solve_ls(y, &spec.ls).map_err(frame_err(t)))
            .collect::<Result<Vec<_>, _>>()?,
        SolverId::PrioriLs => {
            info!("frame 1: no prior available, reconstructing with ls");
            if ys.len() == 1 {
                warn!("single-frame sequence: priori-ls reduces to ls");
            }
            solve_sequence(&ys, &spec.ls, &spec.priori).map_err(Failure::Run)?
        }
    };
    println!("{ROW_HEADER}");
    for (t, (r, v)) in results.iter().zip(&vols).enumerate() {
        print_row(t + 1, r, v)?;
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(Error::from)?;
        for (t, (r, v)) in results.iter().zip(&vols).enumerate() {
            save_result(&dir.join(format!("frame_{:03}", t + 1)), r, v)?;
        }
    }
    Ok(())
}

fn sweep(
    config: &ConfigArgs,
    output_dir: Option<PathBuf>,
    rates: Option<&str>,
    solvers: Option<&str>,
    n_seeds: Option<usize>,
    threads: Option<usize>,
) -> Outcome {
    let mut spec = load_spec(config)?;
    if let Some(d) = output_dir {
        spec.output_dir = d;
    }
    if let Some(r) = rates {
        spec.rates = r
            .split(',')
            .map(parse_rate)
            .collect::<lsrecon::Result<_>>()
            .map_err(|e| usage(e.to_string()))?;
    }
    if let Some(s) = solvers {
        spec.solvers = s.split(',').map(parse_solver).collect::<Result<_, _>>()?;
    }
    if let Some(n) = n_seeds {
        spec.n_seeds = n;
    }
    spec.validate().map_err(|e| usage(e.to_string()))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| usage(e.to_string()))?;
    let outcome = pool.install(|| run_sweep_to_dir(&spec))?;
    println!("solver,rate,mean_psnr_db");
    for r in &outcome.summary {
        println!("{},{:.6},{:.6}", r.solver, r.rate, r.mean_psnr);
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.cmd {
        Cmd::Phantom {
            cmd: PhantomCmd::Gen { out, config },
        } => phantom_gen(&out, &config),
        Cmd::Mask {
            cmd:
                MaskCmd::Gen {
                    nx,
                    ny,
                    rate,
                    falloff,
                    seed,
                    out,
                },
        } => {
            let rate = parse_rate(&rate).map_err(|e| usage(e.to_string()))?;
            let m = make_mask(nx, ny, rate, falloff, seed).map_err(|e| usage(e.to_string()))?;
            save_mask(&out, &m)?;
            info!("wrote {} of {} samples to {}", m.m(), nx * ny, out.display());
            Ok(())
        }
        Cmd::Recon {
            volume,
            mask,
            prior,
            solver,
            reference,
            frame,
            out,
            config,
        } => recon(
            &volume,
            &mask,
            prior.as_deref(),
            solver.as_deref(),
            reference.as_deref(),
            frame,
            out.as_deref(),
            &config,
        ),
        Cmd::ReconSeq {
            frames,
            first_mask,
            mask,
            solver,
            out,
            config,
        } => recon_seq(&frames, &first_mask, &mask, &solver, out.as_deref(), &config),
        Cmd::Sweep {
            config,
            output_dir,
            rates,
            solvers,
            n_seeds,
            threads,
        } => sweep(
            &config,
            output_dir,
            rates.as_deref(),
            solvers.as_deref(),
            n_seeds,
            threads,
        ),
        Cmd::Eval { reference, estimate } => {
            let a = load_volume(&reference)?;
            let b = load_volume(&estimate)?;
            if a.dims() != b.dims() {
                return Err(usage(format!(
                    "volumes differ in shape: {} vs {}",
                    a.dims(),
                    b.dims()
                )));
            }
            println!("{:.6}", psnr(&a, &b)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
