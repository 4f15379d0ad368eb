//! D numbers over a labelled frame.
//!
//! A D number assigns mass to non-empty subsets of a frame. Unlike a basic
//! probability assignment, the labels of the frame need not be mutually
//! exclusive and the total mass may fall short of 1 (incomplete information).
//!
//! Fusion goes in two stages. Each D number is first discounted by the
//! exclusive coefficient `ε` of its frame: every mass is scaled by `1 - ε` and
//! the whole frame `Θ` gains `ε`. The discounted D numbers are then combined
//! with the conflict-normalized orthogonal sum, where products that land on an
//! empty intersection count as conflict and the rest is rescaled to sum to 1.
//!
//! ```
//! use dfusion::dnumber::{DNumber, Frame};
//!
//! let frame = Frame::new(["P", "NP"]).unwrap();
//! let pathway = DNumber::from_pairs(&frame, &[(&["NP"][..], 1.0)]).unwrap();
//! let source = DNumber::from_pairs(&frame, &[(&["P"][..], 1.0)]).unwrap();
//! let fused = pathway
//!     .discount(0.1195)
//!     .unwrap()
//!     .combine(&source.discount(0.131).unwrap())
//!     .unwrap();
//! assert!((fused.mass_of(&["P"]) - 0.442).abs() < 1e-3);
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use thiserror::Error;

/// Slack allowed on `Σ masses ≤ 1` and on completeness checks.
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Combination fails when the non-conflicting mass is at or below this.
pub const CONFLICT_TOL: f64 = 1e-12;
/// Masses below this are dropped from combination results.
pub const PRUNE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DNumberError {
    #[error("frame must contain at least one label")]
    EmptyFrame,
    #[error("frame label `{0}` appears more than once")]
    DuplicateLabel(String),
    #[error("focal element must be non-empty")]
    EmptyFocal,
    #[error("focal element {focal} contains label `{label}` which is not in the frame")]
    LabelOutsideFrame { focal: String, label: String },
    #[error("focal element {0} is listed more than once")]
    DuplicateFocal(String),
    #[error("mass of {focal} must be a finite number in [0, 1], got {mass}")]
    InvalidMass { focal: String, mass: f64 },
    #[error("total mass {0} exceeds 1")]
    ExcessMass(f64),
    #[error("discount factor must lie in [0, 1], got {0}")]
    InvalidEpsilon(f64),
    #[error("D number is incomplete (total mass {0}); normalize it first")]
    IncompleteInput(f64),
    #[error("D numbers are defined over different frames")]
    FrameMismatch,
    #[error("total conflict between D numbers (k = {0})")]
    TotalConflict(f64),
    #[error("no D numbers to combine")]
    EmptyInput,
}

/// A finite, non-empty set of labels. Order is kept for display only;
/// two frames are equal when they hold the same labels.
#[derive(Debug, Clone)]
pub struct Frame {
    labels: Vec<String>,
}

impl Frame {
    pub fn new<I, S>(labels: I) -> Result<Self, DNumberError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(DNumberError::EmptyFrame);
        }
        let mut seen = HashSet::with_capacity(labels.len());
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(DNumberError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self { labels })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
    }

    fn position(&self, label: &str) -> usize {
        self.labels
            .iter()
            .position(|l| l == label)
            .unwrap_or(usize::MAX)
    }

    /// The focal element holding every label (total ignorance).
    pub fn theta(&self) -> FocalElement {
        FocalElement::from_sorted(sorted_unique(self.labels.iter().cloned()))
    }

    /// Builds a focal element, checking that every label belongs to the frame.
    pub fn focal<S: AsRef<str>>(&self, labels: &[S]) -> Result<FocalElement, DNumberError> {
        let focal = FocalElement::new(labels.iter().map(|s| s.as_ref().to_owned()))?;
        self.check(&focal)?;
        Ok(focal)
    }

    fn check(&self, focal: &FocalElement) -> Result<(), DNumberError> {
        match focal.labels().iter().find(|l| !self.contains(l)) {
            Some(label) => Err(DNumberError::LabelOutsideFrame {
                focal: focal.to_string(),
                label: label.clone(),
            }),
            None => Ok(()),
        }
    }

    /// Labels of `focal` listed in frame order.
    pub fn ordered<'a>(&self, focal: &'a FocalElement) -> Vec<&'a str> {
        let mut v: Vec<&str> = focal.labels().iter().map(String::as_str).collect();
        v.sort_by_key(|l| self.position(l));
        v
    }

    fn sort_key(&self, focal: &FocalElement) -> (usize, Vec<usize>) {
        let mut idx: Vec<usize> = focal.labels().iter().map(|l| self.position(l)).collect();
        idx.sort_unstable();
        (idx.len(), idx)
    }
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.labels.iter().all(|l| other.contains(l))
    }
}

impl Eq for Frame {}

fn sorted_unique(labels: impl Iterator<Item = String>) -> Vec<String> {
    let mut v: Vec<String> = labels.collect();
    v.sort();
    v.dedup();
    v
}

/// A non-empty set of labels, stored sorted so that equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FocalElement(Vec<String>);

impl FocalElement {
    pub fn new<I, S>(labels: I) -> Result<Self, DNumberError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let v = sorted_unique(labels.into_iter().map(Into::into));
        if v.is_empty() {
            return Err(DNumberError::EmptyFocal);
        }
        Ok(Self(v))
    }

    fn from_sorted(v: Vec<String>) -> Self {
        Self(v)
    }

    pub fn labels(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.0.binary_search_by(|l| l.as_str().cmp(label)).is_ok()
    }

    /// Label-set intersection, `None` when empty.
    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i].clone());
                    i += 1;
                    j += 1;
                }
            }
        }
        (!out.is_empty()).then_some(Self(out))
    }
}

impl fmt::Display for FocalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.join(", "))
    }
}

/// A mass assignment over the non-empty subsets of a frame, total ≤ 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DNumber {
    frame: Frame,
    masses: BTreeMap<FocalElement, f64>,
}

/// Output of a pairwise combination together with its conflict.
#[derive(Debug, Clone, PartialEq)]
pub struct Combination {
    pub result: DNumber,
    /// Mass of all products whose focal elements do not intersect.
    pub conflict: f64,
}

impl DNumber {
    /// Validates and builds a D number. Zero masses are dropped.
    pub fn new<I>(frame: Frame, masses: I) -> Result<Self, DNumberError>
    where
        I: IntoIterator<Item = (FocalElement, f64)>,
    {
        let mut map = BTreeMap::new();
        for (focal, mass) in masses {
            frame.check(&focal)?;
            if !mass.is_finite() || !(0.0..=1.0).contains(&mass) {
                return Err(DNumberError::InvalidMass {
                    focal: focal.to_string(),
                    mass,
                });
            }
            if map.contains_key(&focal) {
                return Err(DNumberError::DuplicateFocal(focal.to_string()));
            }
            map.insert(focal, mass);
        }
        map.retain(|_, m| *m > 0.0);
        let total: f64 = map.values().sum();
        if total > 1.0 + COMPLETENESS_TOL {
            return Err(DNumberError::ExcessMass(total));
        }
        Ok(Self { frame, masses: map })
    }

    /// Convenience constructor from label slices.
    pub fn from_pairs<S: AsRef<str>>(
        frame: &Frame,
        pairs: &[(&[S], f64)],
    ) -> Result<Self, DNumberError> {
        let masses = pairs
            .iter()
            .map(|(labels, m)| frame.focal(labels).map(|f| (f, *m)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(frame.clone(), masses)
    }

    /// Total ignorance: all mass on the whole frame.
    pub fn vacuous(frame: &Frame) -> Self {
        Self {
            masses: BTreeMap::from([(frame.theta(), 1.0)]),
            frame: frame.clone(),
        }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn mass(&self, focal: &FocalElement) -> f64 {
        self.masses.get(focal).copied().unwrap_or(0.0)
    }

    /// Mass of the focal element named by `labels`; 0 for unknown labels.
    pub fn mass_of<S: AsRef<str>>(&self, labels: &[S]) -> f64 {
        FocalElement::new(labels.iter().map(|s| s.as_ref().to_owned()))
            .map(|f| self.mass(&f))
            .unwrap_or(0.0)
    }

    pub fn theta_mass(&self) -> f64 {
        self.mass(&self.frame.theta())
    }

    /// Focal elements and masses in canonical (sorted-label) order.
    pub fn iter(&self) -> impl Iterator<Item = (&FocalElement, f64)> {
        self.masses.iter().map(|(k, &v)| (k, v))
    }

    /// Focal elements ordered by size, then by position of their labels in
    /// the frame. Used for printing.
    pub fn iter_frame_order(&self) -> Vec<(&FocalElement, f64)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_by_key(|(f, _)| self.frame.sort_key(f));
        v
    }

    pub fn focal_count(&self) -> usize {
        self.masses.len()
    }

    /// Sum of all masses.
    pub fn completeness(&self) -> f64 {
        self.masses.values().sum()
    }

    pub fn is_complete(&self) -> bool {
        (self.completeness() - 1.0).abs() <= COMPLETENESS_TOL
    }

    /// Assigns the deficit `1 - Σ` to the whole frame.
    pub fn normalize_incomplete(&self) -> Self {
        let deficit = 1.0 - self.completeness();
        let mut out = self.clone();
        if deficit > 0.0 {
            *out.masses.entry(self.frame.theta()).or_insert(0.0) += deficit;
        }
        out
    }

    /// Scales every mass by `1 - ε` and moves the freed `ε` onto `Θ`.
    pub fn discount(&self, epsilon: f64) -> Result<Self, DNumberError> {
        if !epsilon.is_finite() || !(0.0..=1.0).contains(&epsilon) {
            return Err(DNumberError::InvalidEpsilon(epsilon));
        }
        let total = self.completeness();
        if total < 1.0 - COMPLETENESS_TOL {
            return Err(DNumberError::IncompleteInput(total));
        }
        if epsilon == 0.0 {
            return Ok(self.clone());
        }
        let keep = 1.0 - epsilon;
        let mut masses: BTreeMap<_, _> = self
            .masses
            .iter()
            .map(|(f, &m)| (f.clone(), m * keep))
            .collect();
        *masses.entry(self.frame.theta()).or_insert(0.0) += epsilon;
        masses.retain(|_, m| *m > 0.0);
        Ok(Self {
            frame: self.frame.clone(),
            masses,
        })
    }

    /// Conflict-normalized combination of two complete D numbers.
    pub fn combine(&self, other: &Self) -> Result<Self, DNumberError> {
        self.combine_with_conflict(other).map(|c| c.result)
    }

    pub fn combine_with_conflict(&self, other: &Self) -> Result<Combination, DNumberError> {
        if self.frame != other.frame {
            return Err(DNumberError::FrameMismatch);
        }
        for d in [self, other] {
            if !d.is_complete() {
                return Err(DNumberError::IncompleteInput(d.completeness()));
            }
        }
        let mut joint: BTreeMap<FocalElement, f64> = BTreeMap::new();
        let mut conflict = 0.0;
        // Normalizer accumulated from the non-conflicting products; equals
        // 1 - k for complete inputs without the cancellation of 1 - k.
        let mut agreement = 0.0;
        for (b, mb) in &self.masses {
            for (c, mc) in &other.masses {
                let product = mb * mc;
                match b.intersect(c) {
                    Some(a) => {
                        *joint.entry(a).or_insert(0.0) += product;
                        agreement += product;
                    }
                    None => conflict += product,
                }
            }
        }
        if agreement <= CONFLICT_TOL {
            return Err(DNumberError::TotalConflict(conflict));
        }
        for m in joint.values_mut() {
            *m /= agreement;
        }
        joint.retain(|_, m| *m >= PRUNE_TOL);
        Ok(Combination {
            result: Self {
                frame: self.frame.clone(),
                masses: joint,
            },
            conflict,
        })
    }
}

/// Left fold of [`DNumber::combine`]. A single input is returned unchanged.
pub fn combine_all(ds: &[DNumber]) -> Result<DNumber, DNumberError> {
    let (first, rest) = ds.split_first().ok_or(DNumberError::EmptyInput)?;
    if rest.is_empty() {
        return Ok(first.clone());
    }
    rest.iter().try_fold(first.clone(), |acc, d| acc.combine(d))
}

impl fmt::Display for DNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (focal, m) in self.iter_frame_order() {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{{{}}}: {m}", self.frame.ordered(focal).join(", "))?;
        }
        Ok(())
    }
}
