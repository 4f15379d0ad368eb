//! Contaminant-intrusion risk for a water distribution network.
//!
//! Three bodies of evidence each observe one surrogate measure:
//!
//! | body     | element          | surrogate measure                          |
//! |----------|------------------|--------------------------------------------|
//! | pathway  | intrusion path   | pipe breakage rate (breaks/100 km/year)    |
//! | pressure | driving force    | transient pressure (psi)                   |
//! | source   | contamination    | distance from a contaminant source (m)     |
//!
//! Each body maps its measurement onto a D number over `{P, NP}` (intrusion
//! possible / not possible) through fuzzy curves, one per supported focal
//! element. The D numbers are discounted by their body's own exclusive
//! coefficient and fused into a [`RiskTriple`].

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dnumber::{self, DNumber, DNumberError, FocalElement, Frame};
use crate::exclusivity::{ExclusivityError, Granulation, Granule};
use crate::fuzzy::Trapezoid;

pub const POSSIBLE: &str = "P";
pub const NOT_POSSIBLE: &str = "NP";

/// A derived ε further than this from a configured override is reported.
pub const EPSILON_WARN_GAP: f64 = 0.02;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntrusionError {
    #[error("{0} body has no curves")]
    NoCurves(EvidenceKind),
    #[error("{0} body needs an explicit epsilon: at least 2 curves are required to derive one")]
    MissingEpsilon(EvidenceKind),
    #[error("{kind} body: epsilon must lie in [0, 1], got {value}")]
    InvalidEpsilon { kind: EvidenceKind, value: f64 },
    #[error("{kind} body: {source}")]
    Exclusivity {
        kind: EvidenceKind,
        #[source]
        source: ExclusivityError,
    },
    #[error("expected the {expected} body, got {found}")]
    WrongBody {
        expected: EvidenceKind,
        found: EvidenceKind,
    },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Fusion(#[from] DNumberError),
}

/// Which intrusion element a body of evidence speaks to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvidenceKind {
    Pathway,
    Pressure,
    Source,
}

impl EvidenceKind {
    pub const ALL: [EvidenceKind; 3] = [Self::Pathway, Self::Pressure, Self::Source];

    pub fn name(self) -> &'static str {
        match self {
            Self::Pathway => "pathway",
            Self::Pressure => "pressure",
            Self::Source => "source",
        }
    }
}

impl fmt::Display for EvidenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The three focal elements of `{P, NP}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Proposition {
    /// `{P}`
    Possible,
    /// `{P, NP}`
    Unknown,
    /// `{NP}`
    NotPossible,
}

impl Proposition {
    pub fn from_labels<S: AsRef<str>>(labels: &[S]) -> Option<Self> {
        let has = |l: &str| labels.iter().any(|s| s.as_ref() == l);
        let known = labels
            .iter()
            .all(|s| s.as_ref() == POSSIBLE || s.as_ref() == NOT_POSSIBLE);
        match (known, has(POSSIBLE), has(NOT_POSSIBLE)) {
            (true, true, true) => Some(Self::Unknown),
            (true, true, false) => Some(Self::Possible),
            (true, false, true) => Some(Self::NotPossible),
            _ => None,
        }
    }

    pub fn labels(self) -> &'static [&'static str] {
        match self {
            Self::Possible => &[POSSIBLE],
            Self::Unknown => &[POSSIBLE, NOT_POSSIBLE],
            Self::NotPossible => &[NOT_POSSIBLE],
        }
    }

    pub fn focal(self) -> FocalElement {
        FocalElement::new(self.labels().iter().copied()).expect("non-empty")
    }
}

impl fmt::Display for Proposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels().join(","))
    }
}

/// The frame `{P, NP}`.
pub fn risk_frame() -> Frame {
    Frame::new([POSSIBLE, NOT_POSSIBLE]).expect("two distinct labels")
}

/// One fuzzy curve of a body: where on the axis it supports a proposition.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub supports: Proposition,
    pub shape: Trapezoid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceBody {
    kind: EvidenceKind,
    unit: String,
    curves: Vec<Curve>,
    derived_epsilon: Option<f64>,
    epsilon: f64,
}

/// A configured ε that disagrees with the one derived from the curves.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonWarning {
    pub kind: EvidenceKind,
    pub configured: f64,
    pub derived: f64,
}

impl fmt::Display for EpsilonWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} body: configured epsilon {:.4} differs from the curves' derived epsilon {:.4} by more than {}",
            self.kind, self.configured, self.derived, EPSILON_WARN_GAP
        )
    }
}

impl EvidenceBody {
    /// Builds a body. ε is derived from the curves' relative matrix unless
    /// `epsilon_override` is given; a body with a single curve needs one.
    pub fn new(
        kind: EvidenceKind,
        unit: impl Into<String>,
        curves: Vec<Curve>,
        epsilon_override: Option<f64>,
    ) -> Result<Self, IntrusionError> {
        if curves.is_empty() {
            return Err(IntrusionError::NoCurves(kind));
        }
        let granulation = Granulation::new(
            curves
                .iter()
                .map(|c| Granule::new(c.label.clone(), c.shape))
                .collect(),
        )
        .map_err(|source| IntrusionError::Exclusivity { kind, source })?;
        let derived_epsilon = if curves.len() >= 2 {
            Some(
                granulation
                    .epsilon()
                    .map_err(|source| IntrusionError::Exclusivity { kind, source })?,
            )
        } else {
            None
        };
        let epsilon = match (epsilon_override, derived_epsilon) {
            (Some(e), _) if !(0.0..=1.0).contains(&e) || !e.is_finite() => {
                return Err(IntrusionError::InvalidEpsilon { kind, value: e })
            }
            (Some(e), _) => e,
            (None, Some(e)) => e,
            (None, None) => return Err(IntrusionError::MissingEpsilon(kind)),
        };
        Ok(Self {
            kind,
            unit: unit.into(),
            curves,
            derived_epsilon,
            epsilon,
        })
    }

    pub fn kind(&self) -> EvidenceKind {
        self.kind
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    /// The ε used for discounting.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// The ε implied by the curves alone, when there are at least two.
    pub fn derived_epsilon(&self) -> Option<f64> {
        self.derived_epsilon
    }

    pub fn epsilon_warning(&self) -> Option<EpsilonWarning> {
        let derived = self.derived_epsilon?;
        ((self.epsilon - derived).abs() > EPSILON_WARN_GAP).then_some(EpsilonWarning {
            kind: self.kind,
            configured: self.epsilon,
            derived,
        })
    }

    pub fn to_dnumber(&self, value: f64) -> DNumber {
        evidence_to_dnumber(self, value)
    }
}

/// Reads a measurement through a body's curves.
///
/// Each curve contributes its membership at `value` to the proposition it
/// supports; the contributions are normalized to sum to 1. A value no curve
/// covers yields total ignorance.
pub fn evidence_to_dnumber(body: &EvidenceBody, value: f64) -> DNumber {
    let frame = risk_frame();
    let mut weights = [0.0f64; 3];
    for curve in &body.curves {
        weights[curve.supports as usize] += curve.shape.membership(value);
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return DNumber::vacuous(&frame);
    }
    let props = [
        Proposition::Possible,
        Proposition::Unknown,
        Proposition::NotPossible,
    ];
    let masses = props
        .iter()
        .zip(weights)
        .map(|(p, w)| (p.focal(), w / total));
    DNumber::new(frame, masses).expect("normalized masses over the risk frame")
}

/// One observation of the three surrogate measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Breaks per 100 km per year.
    pub breaks: f64,
    /// Transient pressure in psi; negative values are allowed.
    pub pressure: f64,
    /// Separation distance in meters.
    pub distance: f64,
}

impl Scenario {
    pub fn new(breaks: f64, pressure: f64, distance: f64) -> Result<Self, IntrusionError> {
        let s = Self {
            breaks,
            pressure,
            distance,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), IntrusionError> {
        for (name, v) in [
            ("breaks", self.breaks),
            ("pressure", self.pressure),
            ("distance", self.distance),
        ] {
            if !v.is_finite() {
                return Err(IntrusionError::InvalidScenario(format!(
                    "{name} must be finite, got {v}"
                )));
            }
        }
        if self.distance < 0.0 {
            return Err(IntrusionError::InvalidScenario(format!(
                "distance must be non-negative, got {}",
                self.distance
            )));
        }
        Ok(())
    }

    pub fn value(&self, kind: EvidenceKind) -> f64 {
        match kind {
            EvidenceKind::Pathway => self.breaks,
            EvidenceKind::Pressure => self.pressure,
            EvidenceKind::Source => self.distance,
        }
    }
}

/// Fused masses on `{P}`, `{P, NP}` and `{NP}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskTriple {
    pub p: f64,
    pub p_np: f64,
    pub np: f64,
}

impl RiskTriple {
    pub fn from_dnumber(d: &DNumber) -> Self {
        Self {
            p: d.mass_of(Proposition::Possible.labels()),
            p_np: d.mass_of(Proposition::Unknown.labels()),
            np: d.mass_of(Proposition::NotPossible.labels()),
        }
    }

    pub fn get(&self, p: Proposition) -> f64 {
        match p {
            Proposition::Possible => self.p,
            Proposition::Unknown => self.p_np,
            Proposition::NotPossible => self.np,
        }
    }

    pub fn total(&self) -> f64 {
        self.p + self.p_np + self.np
    }

    /// The proposition carrying the most mass; ties go to the earlier of
    /// `{P}`, `{P, NP}`, `{NP}`.
    pub fn verdict(&self) -> Proposition {
        let mut best = Proposition::Possible;
        for p in [Proposition::Unknown, Proposition::NotPossible] {
            if self.get(p) > self.get(best) {
                best = p;
            }
        }
        best
    }
}

impl fmt::Display for RiskTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.3}, {:.3}, {:.3})", self.p, self.p_np, self.np)
    }
}

/// The three bodies of evidence of the intrusion model.
#[derive(Debug, Clone, PartialEq)]
pub struct IntrusionModel {
    pathway: EvidenceBody,
    pressure: EvidenceBody,
    source: EvidenceBody,
}

impl IntrusionModel {
    pub fn new(
        pathway: EvidenceBody,
        pressure: EvidenceBody,
        source: EvidenceBody,
    ) -> Result<Self, IntrusionError> {
        for (body, expected) in [&pathway, &pressure, &source]
            .into_iter()
            .zip(EvidenceKind::ALL)
        {
            if body.kind != expected {
                return Err(IntrusionError::WrongBody {
                    expected,
                    found: body.kind,
                });
            }
        }
        Ok(Self {
            pathway,
            pressure,
            source,
        })
    }

    pub fn body(&self, kind: EvidenceKind) -> &EvidenceBody {
        match kind {
            EvidenceKind::Pathway => &self.pathway,
            EvidenceKind::Pressure => &self.pressure,
            EvidenceKind::Source => &self.source,
        }
    }

    pub fn bodies(&self) -> [&EvidenceBody; 3] {
        [&self.pathway, &self.pressure, &self.source]
    }

    pub fn warnings(&self) -> Vec<EpsilonWarning> {
        self.bodies()
            .into_iter()
            .filter_map(EvidenceBody::epsilon_warning)
            .collect()
    }

    /// Discounted per-body D numbers for a scenario, in body order.
    pub fn discounted_evidence(&self, scenario: &Scenario) -> Result<[DNumber; 3], IntrusionError> {
        let d = |body: &EvidenceBody| {
            body.to_dnumber(scenario.value(body.kind))
                .discount(body.epsilon)
        };
        Ok([d(&self.pathway)?, d(&self.pressure)?, d(&self.source)?])
    }

    pub fn assess(&self, scenario: &Scenario) -> Result<RiskTriple, IntrusionError> {
        assess_risk(scenario, self)
    }
}

pub fn assess_risk(
    scenario: &Scenario,
    model: &IntrusionModel,
) -> Result<RiskTriple, IntrusionError> {
    scenario.validate()?;
    let evidence = model.discounted_evidence(scenario)?;
    let fused = dnumber::combine_all(&evidence)?;
    Ok(RiskTriple::from_dnumber(&fused))
}

/// The bundled model.
///
/// The curve shapes are a reconstruction, not published parameters: they
/// give categorical readings at every measurement of the reference
/// scenarios (10 and 30 breaks; −20, 0 and 50 psi; 3 and 20 m) and carry the
/// published per-body ε values as overrides. The ε derived from these
/// curves is within 0.02 of each override.
pub fn default_model() -> IntrusionModel {
    crate::config::parse_model(crate::fixtures::DEFAULT_MODEL).expect("bundled model is valid")
}
