use std::collections::BTreeSet;

use ndarray::Array2;

use crate::error::{Error, Result};

/// Sorted, duplicate-free set of `(row, col)` positions in a transform-domain
/// matrix.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SupportSet {
    indices: BTreeSet<(usize, usize)>,
}

impl SupportSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn insert(&mut self, row: usize, col: usize) -> bool {
        self.indices.insert((row, col))
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.indices.contains(&(row, col))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.indices.iter().copied()
    }

    /// Every index of a `rows × cols` matrix.
    pub fn full(rows: usize, cols: usize) -> Self {
        (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c))).collect()
    }

    pub fn check_bounds(&self, rows: usize, cols: usize) -> Result<()> {
        match self.indices.iter().find(|&&(r, c)| r >= rows || c >= cols) {
            Some(&(r, c)) => Err(Error::Invalid(format!(
                "support index ({r}, {c}) outside {rows}x{cols} matrix"
            ))),
            None => Ok(()),
        }
    }

    /// Dense membership mask; the caller has already checked bounds.
    pub(crate) fn to_mask(&self, rows: usize, cols: usize) -> Array2<bool> {
        let mut mask = Array2::from_elem((rows, cols), false);
        for (r, c) in self.iter() {
            mask[[r, c]] = true;
        }
        mask
    }

    pub fn symmetric_difference_len(&self, other: &SupportSet) -> usize {
        self.indices.symmetric_difference(&other.indices).count()
    }

    /// `|self Δ previous| / |previous|`, the fraction of a support that
    /// changed between two time instants. Zero when both are empty.
    pub fn change_ratio(&self, previous: &SupportSet) -> f64 {
        let diff = self.symmetric_difference_len(previous);
        if previous.is_empty() {
            if diff == 0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff as f64 / previous.len() as f64
        }
    }
}

impl FromIterator<(usize, usize)> for SupportSet {
    fn from_iter<I: IntoIterator<Item = (usize, usize)>>(iter: I) -> Self {
        SupportSet {
            indices: iter.into_iter().collect(),
        }
    }
}

/// What the previous time instant contributes to the current solve: the
/// singular values of its low-rank part and the wavelet support of its
/// sparse part.
#[derive(Debug, Clone, PartialEq)]
pub struct Prior {
    sigma_prev: Vec<f64>,
    support_prev: SupportSet,
}

impl Prior {
    pub fn new(sigma_prev: Vec<f64>, support_prev: SupportSet) -> Result<Self> {
        if sigma_prev.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::Invalid(
                "prior singular values must be finite and non-negative".into(),
            ));
        }
        if sigma_prev.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Invalid(
                "prior singular values must be sorted descending".into(),
            ));
        }
        Ok(Prior {
            sigma_prev,
            support_prev,
        })
    }

    /// A prior that carries no information: zero spectrum, empty support.
    pub fn empty(nz: usize) -> Self {
        Prior {
            sigma_prev: vec![0.0; nz],
            support_prev: SupportSet::new(),
        }
    }

    pub fn sigma_prev(&self) -> &[f64] {
        &self.sigma_prev
    }

    pub fn support_prev(&self) -> &SupportSet {
        &self.support_prev
    }
}
