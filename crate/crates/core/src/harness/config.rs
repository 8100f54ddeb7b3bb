//! Plain-text experiment configuration.
//!
//! ```text
//! # comment
//! [phantom]
//! nx = 32
//! seed = 2024
//!
//! [solver.priori]
//! lambda_l = rel:0.03
//!
//! [sweep]
//! rates = 1/7, 1/5, 1/3
//! solvers = ls, priori-ls
//! ```
//!
//! Unknown sections or keys are rejected with their line number. Values
//! may also be set as `section.key=value` overrides, applied after the file.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::config::{SolverConfig, Threshold};
use crate::error::{Error, Result};
use crate::operators::mask::DEFAULT_DENSITY_FALLOFF;
use crate::operators::wavelet::Wavelet2d;
use crate::phantom::PhantomSpec;
use crate::volume::Dims;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SolverId {
    Ls,
    PrioriLs,
}

impl std::fmt::Display for SolverId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverId::Ls => "ls",
            SolverId::PrioriLs => "priori-ls",
        })
    }
}

impl FromStr for SolverId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ls" => Ok(SolverId::Ls),
            "priori-ls" => Ok(SolverId::PrioriLs),
            other => Err(Error::Invalid(format!(
                "unknown solver {other:?} (expected ls or priori-ls)"
            ))),
        }
    }
}

/// Everything a sweep needs. The solver sections are also what `recon`
/// and `recon-seq` read.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub phantom: PhantomSpec,
    pub ls: SolverConfig,
    pub priori: SolverConfig,
    /// Sampling rate of the first frame of every sequence.
    pub first_frame_rate: f64,
    /// Rates swept for the remaining frames.
    pub rates: Vec<f64>,
    pub solvers: Vec<SolverId>,
    /// Number of mask realizations per rate.
    pub n_seeds: usize,
    pub output_dir: PathBuf,
    pub density_falloff: f64,
    /// Offset added to every derived mask seed.
    pub mask_seed: u64,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            phantom: PhantomSpec::default(),
            ls: SolverConfig::default(),
            priori: SolverConfig::default(),
            first_frame_rate: 0.5,
            rates: vec![1.0 / 7.0, 0.2, 1.0 / 3.0],
            solvers: vec![SolverId::Ls, SolverId::PrioriLs],
            n_seeds: 5,
            output_dir: PathBuf::from("sweep-out"),
            density_falloff: DEFAULT_DENSITY_FALLOFF,
            mask_seed: 0,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Invalid(format!("{key}: cannot parse {v:?}")))
}

/// Accepts `0.25` or a fraction such as `1/7`.
pub fn parse_rate(v: &str) -> Result<f64> {
    let v = v.trim();
    match v.split_once('/') {
        Some((a, b)) => {
            let a: f64 = parse_num("rate", a.trim())?;
            let b: f64 = parse_num("rate", b.trim())?;
            if b == 0.0 {
                return Err(Error::Invalid(format!("rate {v:?} divides by zero")));
            }
            Ok(a / b)
        }
        None => parse_num("rate", v),
    }
}

fn parse_list<T>(v: &str, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    v.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| f(s.trim()))
        .collect()
}

fn set_solver(cfg: &mut SolverConfig, key: &str, v: &str) -> Result<()> {
    match key {
        "lambda_l" => cfg.lambda_l = Threshold::from_str(v)?,
        "lambda_s" => cfg.lambda_s = Threshold::from_str(v)?,
        "lambda_p" => cfg.lambda_p = parse_num(key, v)?,
        "tol" => cfg.tol = parse_num(key, v)?,
        "max_iter" => cfg.max_iter = parse_num(key, v)?,
        "support_eps" => cfg.support_eps = parse_num(key, v)?,
        _ => return Err(Error::Invalid(format!("unknown solver key {key:?}"))),
    }
    Ok(())
}

fn set_phantom(p: &mut PhantomSpec, key: &str, v: &str) -> Result<()> {
    match key {
        "nx" => p.dims.nx = parse_num(key, v)?,
        "ny" => p.dims.ny = parse_num(key, v)?,
        "nz" => p.dims.nz = parse_num(key, v)?,
        "n_frames" => p.n_frames = parse_num(key, v)?,
        "background_rank" => p.background_rank = parse_num(key, v)?,
        "n_blobs" => p.n_blobs = parse_num(key, v)?,
        "n_static" => p.n_static = parse_num(key, v)?,
        "blob_amplitude" => p.blob_amplitude = parse_num(key, v)?,
        "blob_width" => p.blob_width = parse_num(key, v)?,
        "motion_step" => p.motion_step = parse_num(key, v)?,
        "drift" => p.drift = parse_num(key, v)?,
        "noise_sigma" => p.noise_sigma = parse_num(key, v)?,
        "seed" => p.seed = parse_num(key, v)?,
        _ => return Err(Error::Invalid(format!("unknown phantom key {key:?}"))),
    }
    Ok(())
}

impl ExperimentSpec {
    /// Sets one `key` of `section`.
    pub fn set(&mut self, section: &str, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match section {
            "phantom" => set_phantom(&mut self.phantom, key, v),
            "solver.ls" => set_solver(&mut self.ls, key, v),
            "solver.priori" => set_solver(&mut self.priori, key, v),
            "sweep" => {
                match key {
                    "first_frame_rate" => self.first_frame_rate = parse_rate(v)?,
                    "rates" => self.rates = parse_list(v, parse_rate)?,
                    "solvers" => self.solvers = parse_list(v, SolverId::from_str)?,
                    "n_seeds" => self.n_seeds = parse_num(key, v)?,
                    "output_dir" => self.output_dir = PathBuf::from(v),
                    "density_falloff" => self.density_falloff = parse_num(key, v)?,
                    "mask_seed" => self.mask_seed = parse_num(key, v)?,
                    _ => return Err(Error::Invalid(format!("unknown sweep key {key:?}"))),
                }
                Ok(())
            }
            _ => Err(Error::Invalid(format!("unknown section [{section}]"))),
        }
    }

    /// Applies `section.key=value`.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (path, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Invalid(format!("override {assignment:?} is not section.key=value")))?;
        let (section, key) = path
            .trim()
            .rsplit_once('.')
            .ok_or_else(|| Error::Invalid(format!("override {assignment:?} lacks a section")))?;
        self.set(section, key, value)
    }

    /// Parses a config file body on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = ExperimentSpec::default();
        let mut section: Option<String> = None;
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |e: Error| Error::Invalid(format!("line {}: {e}", no + 1));
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| at(Error::Invalid(format!("malformed section header {line:?}"))))?;
                section = Some(name.trim().to_string());
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(Error::Invalid(format!("expected key = value, got {line:?}"))))?;
            let sec = section
                .as_deref()
                .ok_or_else(|| at(Error::Invalid("key outside any section".into())))?;
            spec.set(sec, key.trim(), value).map_err(at)?;
        }
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Invalid(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn dims(&self) -> Dims {
        self.phantom.dims
    }

    /// Checks every setting, including that the grid suits the wavelet,
    /// without generating anything.
    pub fn validate(&self) -> Result<()> {
        Dims::new(self.phantom.dims.nx, self.phantom.dims.ny, self.phantom.dims.nz)?;
        self.phantom.validate()?;
        Wavelet2d::default().check_dims(self.phantom.dims)?;
        self.ls
            .validate()
            .map_err(|e| Error::Invalid(format!("[solver.ls] {e}")))?;
        self.priori
            .validate()
            .map_err(|e| Error::Invalid(format!("[solver.priori] {e}")))?;
        let rate_ok = |r: f64| r > 0.0 && r <= 1.0;
        if !rate_ok(self.first_frame_rate) {
            return Err(Error::Invalid(format!(
                "first_frame_rate {} outside (0, 1]",
                self.first_frame_rate
            )));
        }
        if self.rates.is_empty() {
            return Err(Error::Invalid("rates must not be empty".into()));
        }
        if let Some(r) = self.rates.iter().find(|&&r| !(r > 0.0 && r < 1.0)) {
            return Err(Error::Invalid(format!("rate {r} outside (0, 1)")));
        }
        if self.rates.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("rates must be strictly increasing".into()));
        }
        if self.n_seeds == 0 {
            return Err(Error::Invalid("n_seeds must be at least 1".into()));
        }
        if self.solvers.is_empty() {
            return Err(Error::Invalid("solvers must not be empty".into()));
        }
        let mut sorted = self.solvers.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.solvers.len() {
            return Err(Error::Invalid("solvers listed twice".into()));
        }
        if !(self.density_falloff > 0.0 && self.density_falloff.is_finite()) {
            return Err(Error::Invalid(format!(
                "density_falloff must be positive, got {}",
                self.density_falloff
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "
# desk-scale sweep
[phantom]
nx = 16
ny = 16   # trailing comment
seed = 7

[solver.ls]
lambda_l = rel:0.3
max_iter = 50

[solver.priori]
lambda_p = 0.25
lambda_s = 0.002

[sweep]
rates = 1/7, 0.2 ,1/3
solvers = priori-ls
n_seeds = 2
output_dir = out/run1
";

    #[test]
    fn parses_all_sections() {
        let s = ExperimentSpec::parse(SAMPLE).unwrap();
        assert_eq!(
            (s.phantom.dims.nx, s.phantom.dims.ny, s.phantom.seed),
            (16, 16, 7)
        );
        assert_eq!(s.ls.lambda_l, Threshold::Relative(0.3));
        assert_eq!(s.ls.max_iter, 50);
        assert_eq!(s.priori.lambda_p, 0.25);
        assert_eq!(s.priori.lambda_s, Threshold::Absolute(0.002));
        assert_eq!(s.rates, vec![1.0 / 7.0, 0.2, 1.0 / 3.0]);
        assert_eq!(s.solvers, vec![SolverId::PrioriLs]);
        assert_eq!(s.n_seeds, 2);
        assert_eq!(s.output_dir, PathBuf::from("out/run1"));
        s.validate().unwrap();
    }

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(
            ExperimentSpec::parse("# nothing\n\n").unwrap(),
            ExperimentSpec::default()
        );
        ExperimentSpec::default().validate().unwrap();
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = ExperimentSpec::parse("[phantom]\nnx = 16\nbogus = 1\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        let err = ExperimentSpec::parse("nx = 16\n").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
        assert!(ExperimentSpec::parse("[nope]\nx = 1\n").is_err());
        assert!(ExperimentSpec::parse("[phantom\n").is_err());
        assert!(ExperimentSpec::parse("[phantom]\nnx 16\n").is_err());
        assert!(ExperimentSpec::parse("[phantom]\nnx = sixteen\n").is_err());
    }

    #[test]
    fn overrides_win_over_file() {
        let mut s = ExperimentSpec::parse(SAMPLE).unwrap();
        s.apply_override("solver.priori.lambda_p=0.75").unwrap();
        s.apply_override("sweep.rates = 0.1,0.3").unwrap();
        assert_eq!(s.priori.lambda_p, 0.75);
        assert_eq!(s.rates, vec![0.1, 0.3]);
        assert!(s.apply_override("lambda_p").is_err());
        assert!(s.apply_override("lambda_p=1").is_err());
    }

    #[test]
    fn validation_rejects_bad_sweeps() {
        let bad = |f: fn(&mut ExperimentSpec)| {
            let mut s = ExperimentSpec::default();
            f(&mut s);
            s.validate().is_err()
        };
        assert!(bad(|s| s.rates = vec![]));
        assert!(bad(|s| s.rates = vec![0.3, 0.2]));
        assert!(bad(|s| s.rates = vec![0.2, 0.2]));
        assert!(bad(|s| s.rates = vec![0.0, 0.2]));
        assert!(bad(|s| s.rates = vec![0.5, 1.0]));
        assert!(bad(|s| s.n_seeds = 0));
        assert!(bad(|s| s.solvers = vec![]));
        assert!(bad(|s| s.solvers = vec![SolverId::Ls, SolverId::Ls]));
        assert!(bad(|s| s.first_frame_rate = 1.5));
        assert!(bad(|s| s.phantom.dims.nx = 12));
        assert!(bad(|s| s.priori.lambda_p = 2.0));
    }

    #[test]
    fn rates_and_solver_names() {
        assert_eq!(parse_rate("1/4").unwrap(), 0.25);
        assert_eq!(parse_rate(" 0.5 ").unwrap(), 0.5);
        assert!(parse_rate("1/0").is_err());
        assert!(parse_rate("x").is_err());
        for id in [SolverId::Ls, SolverId::PrioriLs] {
            assert_eq!(id.to_string().parse::<SolverId>().unwrap(), id);
        }
        assert!(SolverId::Ls < SolverId::PrioriLs);
    }
}
