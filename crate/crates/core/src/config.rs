//! Solver parameters.

use crate::error::{Error, Result};

/// A threshold either given directly or as a fraction of a magnitude read
/// off the initial zero-filled proxy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Absolute(f64),
    Relative(f64),
}

impl Threshold {
    pub fn resolve(self, reference: f64) -> f64 {
        match self {
            Threshold::Absolute(v) => v,
            Threshold::Relative(f) => f * reference,
        }
    }

    fn value(self) -> f64 {
        match self {
            Threshold::Absolute(v) | Threshold::Relative(v) => v,
        }
    }
}

impl std::fmt::Display for Threshold {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Threshold::Absolute(v) => write!(f, "{v}"),
            Threshold::Relative(v) => write!(f, "rel:{v}"),
        }
    }
}

impl std::str::FromStr for Threshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Invalid(format!("bad threshold value {s:?}")))
        };
        match s.strip_prefix("rel:") {
            Some(rest) => Ok(Threshold::Relative(parse(rest)?)),
            None => Ok(Threshold::Absolute(parse(s)?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Singular-value threshold; relative values scale `σ_max` of the proxy.
    pub lambda_l: Threshold,
    /// Wavelet threshold; relative values scale the largest wavelet
    /// coefficient magnitude of the proxy.
    pub lambda_s: Threshold,
    /// Step toward the previous frame's spectrum, in `[0, 1]`.
    pub lambda_p: f64,
    /// Stop once the relative change between iterates drops below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Fraction of the peak wavelet magnitude above which a coefficient
    /// counts as part of the support.
    pub support_eps: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            lambda_l: Threshold::Relative(0.03),
            lambda_s: Threshold::Relative(0.003),
            lambda_p: 0.5,
            tol: 1e-3,
            max_iter: 300,
            support_eps: 0.02,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, t) in [("lambda_l", self.lambda_l), ("lambda_s", self.lambda_s)] {
            let v = t.value();
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Invalid(format!("{name} must be positive, got {t}")));
            }
        }
        if !(0.0..=1.0).contains(&self.lambda_p) {
            return Err(Error::Invalid(format!(
                "lambda_p must lie in [0, 1], got {}",
                self.lambda_p
            )));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Invalid(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::Invalid("max_iter must be at least 1".into()));
        }
        if !(self.support_eps > 0.0 && self.support_eps < 1.0) {
            return Err(Error::Invalid(format!(
                "support_eps must lie in (0, 1), got {}",
                self.support_eps
            )));
        }
        Ok(())
    }
}
