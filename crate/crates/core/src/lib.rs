//! D-number evidence fusion.
//!
//! * [`fuzzy`]: trapezoidal fuzzy numbers and the exact areas of their
//!   pointwise min / max.
//! * [`exclusivity`]: relative matrix and exclusive coefficient `ε` of a
//!   set of labelled fuzzy granules.
//! * [`dnumber`]: D numbers, `ε`-discounting and conflict-normalized
//!   combination.
//! * [`intrusion`]: contaminant-intrusion risk from pipe breaks, transient
//!   pressure and distance to a contamination source.
//! * [`config`]: the JSON file formats shared with the command-line tool.

pub mod config;
pub mod dnumber;
pub mod exclusivity;
pub mod fixtures;
pub mod fuzzy;
pub mod intrusion;

pub use dnumber::{combine_all, Combination, DNumber, DNumberError, FocalElement, Frame};
pub use exclusivity::{
    exclusive_coefficient, relative_matrix, ExclusivityError, Granulation, Granule, RelativeMatrix,
};
pub use fuzzy::{intersection_area, non_exclusive_degree, union_area, FuzzyError, Trapezoid};
pub use intrusion::{
    assess_risk, default_model, evidence_to_dnumber, EvidenceBody, EvidenceKind, IntrusionError,
    IntrusionModel, Proposition, RiskTriple, Scenario,
};
