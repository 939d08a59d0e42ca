//! Observations: the unordered data a model is projected onto.
//!
//! Two payload families are supported. Glyph data are directed line
//! segments `(x, y, orientation, length)` where `(x, y)` is the start point
//! and orientation is in degrees; temporal data are timestamped atomic
//! events carrying a label and an agent id.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which demo domain a data set or model belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Glyph,
    Temporal,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Glyph => f.write_str("glyph"),
            Domain::Temporal => f.write_str("temporal"),
        }
    }
}

/// A directed segment in grid units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub x: f64,
    pub y: f64,
    /// Direction of travel from the start point, degrees.
    pub orientation: f64,
    pub length: f64,
}

impl Segment {
    /// Segment running from `start` to `end`.
    pub fn between(start: (f64, f64), end: (f64, f64)) -> Segment {
        let (dx, dy) = (end.0 - start.0, end.1 - start.1);
        Segment {
            x: start.0,
            y: start.1,
            orientation: dy.atan2(dx).to_degrees(),
            length: dx.hypot(dy),
        }
    }

    pub fn start(&self) -> (f64, f64) {
        (self.x, self.y)
    }

    pub fn direction(&self) -> (f64, f64) {
        let r = self.orientation.to_radians();
        (r.cos(), r.sin())
    }

    pub fn end(&self) -> (f64, f64) {
        let (c, s) = self.direction();
        (self.x + c * self.length, self.y + s * self.length)
    }
}

/// An atomic action detected at one time point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Event {
    pub timestamp: i64,
    pub label: String,
    pub agent: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Payload {
    Segment(Segment),
    Event(Event),
}

impl Payload {
    pub fn domain(&self) -> Domain {
        match self {
            Payload::Segment(_) => Domain::Glyph,
            Payload::Event(_) => Domain::Temporal,
        }
    }

    pub fn as_segment(&self) -> Option<&Segment> {
        match self {
            Payload::Segment(s) => Some(s),
            Payload::Event(_) => None,
        }
    }

    pub fn as_event(&self) -> Option<&Event> {
        match self {
            Payload::Event(e) => Some(e),
            Payload::Segment(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Datum {
    pub id: String,
    pub payload: Payload,
    pub confidence: f64,
}

impl Datum {
    pub fn new(id: impl Into<String>, payload: Payload, confidence: f64) -> Datum {
        Datum { id: id.into(), payload, confidence }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DataError {
    #[error("duplicate datum id `{0}`")]
    DuplicateId(String),
    #[error("datum `{id}` has confidence {confidence} outside [0, 1]")]
    Confidence { id: String, confidence: f64 },
    #[error("datum `{0}` has a non-finite or non-positive payload field")]
    Payload(String),
    #[error("datum `{id}` is a {found} payload in a {expected} data set")]
    DomainMismatch { id: String, expected: Domain, found: Domain },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDataSet {
    domain: Domain,
    data: Vec<Datum>,
}

/// A validated set of observations sharing one domain tag.
///
/// Order of `data` is preserved from construction and is the order every
/// search routine visits data in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDataSet", into = "RawDataSet")]
pub struct DataSet {
    domain: Domain,
    data: Vec<Datum>,
    index: HashMap<String, usize>,
}

impl From<DataSet> for RawDataSet {
    fn from(d: DataSet) -> Self {
        RawDataSet { domain: d.domain, data: d.data }
    }
}

impl TryFrom<RawDataSet> for DataSet {
    type Error = DataError;
    fn try_from(raw: RawDataSet) -> Result<Self, DataError> {
        DataSet::new(raw.domain, raw.data)
    }
}

impl DataSet {
    pub fn new(domain: Domain, data: Vec<Datum>) -> Result<DataSet, DataError> {
        let mut index = HashMap::with_capacity(data.len());
        for (i, d) in data.iter().enumerate() {
            if !(0.0..=1.0).contains(&d.confidence) {
                return Err(DataError::Confidence { id: d.id.clone(), confidence: d.confidence });
            }
            if d.payload.domain() != domain {
                return Err(DataError::DomainMismatch {
                    id: d.id.clone(),
                    expected: domain,
                    found: d.payload.domain(),
                });
            }
            if let Payload::Segment(s) = &d.payload {
                let finite = s.x.is_finite() && s.y.is_finite() && s.orientation.is_finite();
                if !finite || !(s.length.is_finite() && s.length > 0.0) {
                    return Err(DataError::Payload(d.id.clone()));
                }
            }
            if index.insert(d.id.clone(), i).is_some() {
                return Err(DataError::DuplicateId(d.id.clone()));
            }
        }
        Ok(DataSet { domain, data, index })
    }

    pub fn empty(domain: Domain) -> DataSet {
        DataSet { domain, data: Vec::new(), index: HashMap::new() }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn data(&self) -> &[Datum] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Datum> {
        self.index.get(id).map(|&i| &self.data[i])
    }

    pub(crate) fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// Copy of this data set without the given datum ids.
    pub fn without(&self, masked: &BTreeSet<String>) -> DataSet {
        let kept = self.data.iter().filter(|d| !masked.contains(&d.id)).cloned().collect();
        DataSet::new(self.domain, kept).expect("subset of a valid data set is valid")
    }

    /// Copy of this data set with the same ids but transformed payloads.
    pub fn map_payloads(&self, mut f: impl FnMut(&Payload) -> Payload) -> Result<DataSet, DataError> {
        let data = self
            .data
            .iter()
            .map(|d| Datum { id: d.id.clone(), payload: f(&d.payload), confidence: d.confidence })
            .collect();
        DataSet::new(self.domain, data)
    }
}
