//! JSON file formats: granulations, D numbers, intrusion models and scenario
//! lists.
//!
//! Validation runs inside deserialization, so every rejected entry is
//! reported with the line and column where `serde_json` found it.
//!
//! ```text
//! granulation  { "granules": [ { "label": "Low", "shape": [a, b, c, d] }, .. ] }
//! D number     { "frame": ["P", "NP"], "masses": [ { "focal": ["P"], "value": 0.3 }, .. ] }
//! model        { "frame"?: ["P", "NP"],
//!                "bodies": [ { "name": "pathway", "unit": "..", "epsilon"?: 0.12,
//!                              "curves": [ { "label"?: "..", "focal": ["NP"], "shape": [a, b, c, d] } ] } ] }
//! scenarios    [ { "id": "1", "breaks": 10, "pressure": 0, "distance": 3 }, .. ]
//!              or { "scenarios": [ .. ] }
//! ```

use std::collections::HashSet;
use std::fmt;

use serde::de::{self, MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::dnumber::{DNumber, FocalElement, Frame};
use crate::exclusivity::{Granulation, Granule};
use crate::fuzzy::Trapezoid;
use crate::intrusion::{
    Curve, EvidenceBody, EvidenceKind, IntrusionModel, Proposition, Scenario, NOT_POSSIBLE,
    POSSIBLE,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

/// Fields of a labelled shape entry, read by [`ShapeVisitor`].
struct ShapeRecord {
    label: Option<String>,
    focal: Option<Vec<String>>,
    shape: Trapezoid,
}

/// Reads `{ "label", "focal"?, "shape" }` objects, validating the shape as
/// soon as it is read so the error points at its line.
struct ShapeVisitor {
    what: &'static str,
    with_focal: bool,
}

impl ShapeVisitor {
    fn fields(&self) -> &'static [&'static str] {
        if self.with_focal {
            &["label", "focal", "shape"]
        } else {
            &["label", "shape"]
        }
    }
}

impl<'de> Visitor<'de> for ShapeVisitor {
    type Value = ShapeRecord;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a {} object", self.what)
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<ShapeRecord, A::Error> {
        let mut label: Option<String> = None;
        let mut focal: Option<Vec<String>> = None;
        let mut raw: Option<[f64; 4]> = None;
        let check = |label: &Option<String>, [a, b, c, d]: [f64; 4]| {
            Trapezoid::new(a, b, c, d).map_err(|e| match label {
                Some(l) => de::Error::custom(format!("{} `{l}`: {e}", self.what)),
                None => de::Error::custom(format!("{}: {e}", self.what)),
            })
        };
        while let Some(key) = map.next_key::<String>()? {
            match key.as_str() {
                "label" => {
                    if label.is_some() {
                        return Err(de::Error::duplicate_field("label"));
                    }
                    label = Some(map.next_value()?);
                }
                "focal" if self.with_focal => {
                    if focal.is_some() {
                        return Err(de::Error::duplicate_field("focal"));
                    }
                    focal = Some(map.next_value()?);
                }
                "shape" => {
                    if raw.is_some() {
                        return Err(de::Error::duplicate_field("shape"));
                    }
                    let params: [f64; 4] = map.next_value()?;
                    // Validate now when the label is already known.
                    if label.is_some() {
                        check(&label, params)?;
                    }
                    raw = Some(params);
                }
                other => return Err(de::Error::unknown_field(other, self.fields())),
            }
        }
        let raw = raw.ok_or_else(|| de::Error::missing_field("shape"))?;
        if self.with_focal && focal.is_none() {
            return Err(de::Error::missing_field("focal"));
        }
        if !self.with_focal && label.is_none() {
            return Err(de::Error::missing_field("label"));
        }
        let shape = check(&label, raw)?;
        Ok(ShapeRecord {
            label,
            focal,
            shape,
        })
    }
}

#[derive(Debug, Clone)]
struct GranuleEntry(Granule);

impl<'de> Deserialize<'de> for GranuleEntry {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let visitor = ShapeVisitor {
            what: "granule",
            with_focal: false,
        };
        let rec = deserializer.deserialize_map(visitor)?;
        Ok(Self(Granule::new(rec.label.unwrap_or_default(), rec.shape)))
    }
}

#[derive(Deserialize)]
#[serde(try_from = "RawGranulation")]
struct GranulationDoc(Granulation);

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGranulation {
    granules: Vec<GranuleEntry>,
}

impl TryFrom<RawGranulation> for GranulationDoc {
    type Error = String;

    fn try_from(raw: RawGranulation) -> Result<Self, Self::Error> {
        Granulation::new(raw.granules.into_iter().map(|g| g.0).collect())
            .map(Self)
            .map_err(|e| e.to_string())
    }
}

pub fn parse_granulation(text: &str) -> Result<Granulation, ConfigError> {
    Ok(serde_json::from_str::<GranulationDoc>(text)?.0)
}

/// On-disk form of one D number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DNumberDoc {
    pub frame: Vec<String>,
    pub masses: Vec<MassEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassEntry {
    pub focal: Vec<String>,
    pub value: f64,
}

impl TryFrom<DNumberDoc> for DNumber {
    type Error = String;

    fn try_from(doc: DNumberDoc) -> Result<Self, Self::Error> {
        let frame = Frame::new(doc.frame).map_err(|e| e.to_string())?;
        let masses = doc
            .masses
            .into_iter()
            .map(|m| {
                FocalElement::new(m.focal)
                    .map(|f| (f, m.value))
                    .map_err(|e| e.to_string())
            })
            .collect::<Result<Vec<_>, _>>()?;
        DNumber::new(frame, masses).map_err(|e| e.to_string())
    }
}

impl From<&DNumber> for DNumberDoc {
    fn from(d: &DNumber) -> Self {
        Self {
            frame: d.frame().labels().to_vec(),
            masses: d
                .iter_frame_order()
                .into_iter()
                .map(|(f, value)| MassEntry {
                    focal: d
                        .frame()
                        .ordered(f)
                        .into_iter()
                        .map(str::to_owned)
                        .collect(),
                    value,
                })
                .collect(),
        }
    }
}

#[derive(Deserialize)]
#[serde(try_from = "DNumberDoc")]
struct DNumberEntry(DNumber);

impl TryFrom<DNumberDoc> for DNumberEntry {
    type Error = String;

    fn try_from(doc: DNumberDoc) -> Result<Self, Self::Error> {
        DNumber::try_from(doc).map(Self)
    }
}

/// A JSON array of D numbers.
pub fn parse_dnumbers(text: &str) -> Result<Vec<DNumber>, ConfigError> {
    let entries: Vec<DNumberEntry> = serde_json::from_str(text)?;
    Ok(entries.into_iter().map(|e| e.0).collect())
}

struct CurveEntry(Curve);

impl<'de> Deserialize<'de> for CurveEntry {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let visitor = ShapeVisitor {
            what: "curve",
            with_focal: true,
        };
        let rec = deserializer.deserialize_map(visitor)?;
        let focal = rec.focal.unwrap_or_default();
        let supports = Proposition::from_labels(&focal).ok_or_else(|| {
            de::Error::custom(format!(
                "curve focal element must be [\"P\"], [\"P\", \"NP\"] or [\"NP\"], got {focal:?}"
            ))
        })?;
        Ok(Self(Curve {
            label: rec.label.unwrap_or_else(|| supports.to_string()),
            supports,
            shape: rec.shape,
        }))
    }
}

#[derive(Deserialize)]
#[serde(try_from = "RawBody")]
struct BodyEntry(EvidenceBody);

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBody {
    name: EvidenceKind,
    unit: String,
    epsilon: Option<f64>,
    curves: Vec<CurveEntry>,
}

impl TryFrom<RawBody> for BodyEntry {
    type Error = String;

    fn try_from(raw: RawBody) -> Result<Self, Self::Error> {
        let mut curves: Vec<Curve> = raw.curves.into_iter().map(|c| c.0).collect();
        // Unlabelled curves supporting the same proposition get numbered.
        let mut seen = HashSet::new();
        for c in &mut curves {
            let base = c.label.clone();
            let mut n = 1;
            while !seen.insert(c.label.clone()) {
                n += 1;
                c.label = format!("{base} #{n}");
            }
        }
        EvidenceBody::new(raw.name, raw.unit, curves, raw.epsilon)
            .map(Self)
            .map_err(|e| e.to_string())
    }
}

#[derive(Deserialize)]
#[serde(try_from = "RawModel")]
struct ModelDoc(IntrusionModel);

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    frame: Option<Vec<String>>,
    bodies: Vec<BodyEntry>,
}

impl TryFrom<RawModel> for ModelDoc {
    type Error = String;

    fn try_from(raw: RawModel) -> Result<Self, Self::Error> {
        if let Some(frame) = &raw.frame {
            let mut sorted = frame.clone();
            sorted.sort();
            if sorted != [NOT_POSSIBLE, POSSIBLE] {
                return Err(format!(
                    "model frame must be [\"P\", \"NP\"], got {frame:?}"
                ));
            }
        }
        let mut slots: [Option<EvidenceBody>; 3] = [None, None, None];
        for BodyEntry(body) in raw.bodies {
            let slot = &mut slots[body.kind() as usize];
            if slot.is_some() {
                return Err(format!("{} body is defined more than once", body.kind()));
            }
            *slot = Some(body);
        }
        let [pathway, pressure, source] = slots;
        let missing = |k: EvidenceKind| format!("model has no {k} body");
        IntrusionModel::new(
            pathway.ok_or_else(|| missing(EvidenceKind::Pathway))?,
            pressure.ok_or_else(|| missing(EvidenceKind::Pressure))?,
            source.ok_or_else(|| missing(EvidenceKind::Source))?,
        )
        .map(Self)
        .map_err(|e| e.to_string())
    }
}

pub fn parse_model(text: &str) -> Result<IntrusionModel, ConfigError> {
    Ok(serde_json::from_str::<ModelDoc>(text)?.0)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[allow(dead_code)]
    id: Value,
    breaks: f64,
    pressure: f64,
    distance: f64,
}

/// One row of a scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRow {
    /// Position in the file, starting at 1.
    pub index: usize,
    /// The row's `id`, or `#<index>` when it has none.
    pub id: String,
    pub scenario: Result<Scenario, String>,
}

fn row_id(v: &Value, index: usize) -> String {
    match v.get("id") {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        _ => format!("#{index}"),
    }
}

/// Parses a scenario list. A malformed row becomes an inline error rather
/// than failing the whole file; an empty file is an empty list.
pub fn parse_scenarios(text: &str) -> Result<Vec<ScenarioRow>, ConfigError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Top {
        List(Vec<Value>),
        Wrapped { scenarios: Vec<Value> },
    }
    let rows = match serde_json::from_str::<Top>(text) {
        Ok(Top::List(v)) | Ok(Top::Wrapped { scenarios: v }) => v,
        // Re-parse as a plain value to get a positioned syntax error.
        Err(e) => {
            serde_json::from_str::<Value>(text)?;
            return Err(e.into());
        }
    };
    let mut seen = HashSet::new();
    Ok(rows
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let index = i + 1;
            let id = row_id(&v, index);
            let scenario = parse_row(v, &id, &mut seen);
            ScenarioRow {
                index,
                id,
                scenario,
            }
        })
        .collect())
}

fn parse_row(v: Value, id: &str, seen: &mut HashSet<String>) -> Result<Scenario, String> {
    match v.get("id") {
        Some(Value::String(_)) | Some(Value::Number(_)) => {}
        Some(_) => return Err("id must be a string or a number".into()),
        None => return Err("missing field `id`".into()),
    }
    let raw: RawScenario = serde_json::from_value(v).map_err(|e| e.to_string())?;
    if !seen.insert(id.to_owned()) {
        return Err(format!("duplicate scenario id `{id}`"));
    }
    Scenario::new(raw.breaks, raw.pressure, raw.distance).map_err(|e| e.to_string())
}
