//! Relative matrix and exclusive coefficient of a granulation.
//!
//! The relative matrix holds the pairwise non-exclusive degree of every pair
//! of granules. The exclusive coefficient is the mean of its strict upper
//! triangle, pairs with no overlap included: 0 means the granules are
//! mutually exclusive, 1 means they are all the same shape.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::{self, FuzzyError, Trapezoid};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExclusivityError {
    #[error("granule label `{0}` appears more than once")]
    DuplicateLabel(String),
    #[error("exclusive coefficient needs at least 2 granules, got {0}")]
    TooFewGranules(usize),
    #[error("granules `{left}` and `{right}`: {source}")]
    Degree {
        left: String,
        right: String,
        #[source]
        source: FuzzyError,
    },
}

/// A labelled fuzzy shape on one measurement axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Granule {
    pub label: String,
    pub shape: Trapezoid,
}

impl Granule {
    pub fn new(label: impl Into<String>, shape: Trapezoid) -> Self {
        Self {
            label: label.into(),
            shape,
        }
    }
}

/// An ordered list of granules with unique labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Granulation {
    granules: Vec<Granule>,
}

impl Granulation {
    pub fn new(granules: Vec<Granule>) -> Result<Self, ExclusivityError> {
        let mut seen = HashSet::with_capacity(granules.len());
        for g in &granules {
            if !seen.insert(g.label.as_str()) {
                return Err(ExclusivityError::DuplicateLabel(g.label.clone()));
            }
        }
        Ok(Self { granules })
    }

    pub fn granules(&self) -> &[Granule] {
        &self.granules
    }

    pub fn len(&self) -> usize {
        self.granules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.granules.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.granules.iter().map(|g| g.label.as_str())
    }

    pub fn relative_matrix(&self) -> Result<RelativeMatrix, ExclusivityError> {
        relative_matrix(self)
    }

    /// Shorthand for `exclusive_coefficient(&relative_matrix(self)?)`.
    pub fn epsilon(&self) -> Result<f64, ExclusivityError> {
        exclusive_coefficient(&self.relative_matrix()?)
    }
}

/// Symmetric `n × n` matrix of non-exclusive degrees with a unit diagonal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelativeMatrix {
    labels: Vec<String>,
    entries: Vec<f64>,
}

impl RelativeMatrix {
    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size() + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.size().max(1))
    }

    /// Entries strictly above the diagonal, row by row.
    pub fn upper_triangle(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.size();
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| self.get(i, j)))
    }
}

impl fmt::Display for RelativeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .labels
            .iter()
            .map(|l| l.chars().count())
            .max()
            .unwrap_or(0)
            .max(6);
        write!(f, "{:width$}", "")?;
        for label in &self.labels {
            write!(f, "  {label:>width$}")?;
        }
        for (label, row) in self.labels.iter().zip(self.rows()) {
            writeln!(f)?;
            write!(f, "{label:width$}")?;
            for v in row {
                write!(f, "  {v:>width$.4}")?;
            }
        }
        Ok(())
    }
}

pub fn relative_matrix(g: &Granulation) -> Result<RelativeMatrix, ExclusivityError> {
    let n = g.len();
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        entries[i * n + i] = 1.0;
        for j in i + 1..n {
            let (gi, gj) = (&g.granules[i], &g.granules[j]);
            let deg = fuzzy::non_exclusive_degree(&gi.shape, &gj.shape).map_err(|source| {
                ExclusivityError::Degree {
                    left: gi.label.clone(),
                    right: gj.label.clone(),
                    source,
                }
            })?;
            entries[i * n + j] = deg;
            entries[j * n + i] = deg;
        }
    }
    Ok(RelativeMatrix {
        labels: g.labels().map(str::to_owned).collect(),
        entries,
    })
}

pub fn exclusive_coefficient(r: &RelativeMatrix) -> Result<f64, ExclusivityError> {
    let n = r.size();
    if n < 2 {
        return Err(ExclusivityError::TooFewGranules(n));
    }
    let pairs = (n * (n - 1) / 2) as f64;
    Ok(r.upper_triangle().sum::<f64>() / pairs)
}
