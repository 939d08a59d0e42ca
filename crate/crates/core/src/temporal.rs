//! Loading and unloading as orderings of the same four atomic events.
//!
//! Both models bind `carry`, `contact`, `load_motion` and `depart`, grouped
//! into an approach pair and a finish pair. Loading expects them in that
//! order three ticks apart; unloading expects the reverse. Two ambiguous
//! labels stand in for detector confusion: `motion` partially matches every
//! movement event and `touch` partially matches `contact`.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{DataError, DataSet, Datum, Domain, Event, Payload};
use crate::inference::Strategy;
use crate::metrics::{GroundTruth, TruthInstance};
use crate::model::{Element, Level, Mapping, Model};
use crate::scorers::ScorerSpec;
use crate::workspace::{interpret_scene, ModelRegistry, SceneConfig, SceneInterpretation, WorkspaceError};

pub const CARRY: &str = "carry";
pub const CONTACT: &str = "contact";
pub const LOAD_MOTION: &str = "load-motion";
pub const DEPART: &str = "depart";
pub const MOTION: &str = "motion";
pub const TOUCH: &str = "touch";

/// Leaf ids in loading order.
pub const LEAVES: [&str; 4] = ["carry", "contact", "load_motion", "depart"];
/// Event label each leaf expects, aligned with [`LEAVES`].
pub const LABELS: [&str; 4] = [CARRY, CONTACT, LOAD_MOTION, DEPART];
/// Label printed when no activity is selected.
pub const NONE_LABEL: &str = "none";

const STEP: f64 = 3.0;
const STEP_TOLERANCE: f64 = 1.5;
const DISTRACTOR_LABELS: [&str; 4] = ["walk", "wave", "idle", "look"];

/// Ambiguous label a core label degrades to.
pub fn ambiguous_variant(label: &str) -> Option<&'static str> {
    match label {
        CARRY | LOAD_MOTION | DEPART => Some(MOTION),
        CONTACT => Some(TOUCH),
        _ => None,
    }
}

fn label_match(leaf: &str, label: &str) -> ScorerSpec {
    let partial = match label {
        CONTACT => BTreeMap::from([(TOUCH.to_string(), 0.8)]),
        LOAD_MOTION => BTreeMap::from([(MOTION.to_string(), 0.8)]),
        _ => BTreeMap::from([(MOTION.to_string(), 0.5)]),
    };
    ScorerSpec::LabelMatch { args: vec![leaf.into()], labels: vec![label.into()], partial }
}

fn gap(a: &str, b: &str) -> ScorerSpec {
    ScorerSpec::TimeGap { args: vec![a.into(), b.into()], gap: STEP, tolerance: STEP_TOLERANCE }
}

fn pair(first: usize, second: usize, reversed: bool) -> ScorerSpec {
    let (a, b) = if reversed { (second, first) } else { (first, second) };
    let three = 1.0 / 3.0;
    ScorerSpec::Conjunction {
        children: vec![label_match(LEAVES[first], LABELS[first]), label_match(LEAVES[second], LABELS[second]), gap(LEAVES[a], LEAVES[b])],
        weights: vec![three, three, three],
    }
}

fn activity_model(name: &str, reversed: bool) -> Model {
    let (first, last) = if reversed { (LEAVES[3], LEAVES[0]) } else { (LEAVES[0], LEAVES[3]) };
    let (mid_a, mid_b) = if reversed { (LEAVES[2], LEAVES[1]) } else { (LEAVES[1], LEAVES[2]) };
    let top = ScorerSpec::Conjunction {
        children: vec![
            gap(mid_a, mid_b),
            ScorerSpec::Precedence {
                args: vec![first.into(), last.into()],
                gap: 3.0 * STEP,
                tolerance: STEP_TOLERANCE,
            },
        ],
        weights: vec![0.5, 0.5],
    };
    Model {
        name: name.into(),
        levels: vec![
            Level { index: 1, elements: LEAVES.iter().map(|l| Element::slot(*l)).collect() },
            Level {
                index: 2,
                elements: vec![
                    Element::composite("approach", &LEAVES[..2], pair(0, 1, reversed)),
                    Element::composite("finish", &LEAVES[2..], pair(2, 3, reversed)),
                ],
            },
            Level { index: 3, elements: vec![Element::composite("activity", &["approach", "finish"], top)] },
        ],
    }
}

/// `load` and `unload`.
pub fn build_activity_library() -> ModelRegistry {
    ModelRegistry::new(vec![activity_model("load", false), activity_model("unload", true)])
        .expect("shipped activities are valid")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activity {
    Load,
    Unload,
    Distractor,
}

impl Activity {
    pub fn label(self) -> &'static str {
        match self {
            Activity::Load => "load",
            Activity::Unload => "unload",
            Activity::Distractor => NONE_LABEL,
        }
    }
}

#[derive(Debug, Error)]
pub enum StreamError {
    #[error("invalid stream spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Data(#[from] DataError),
}

fn default_base() -> Vec<i64> {
    vec![2, 5, 8, 11]
}

fn default_agent() -> String {
    "p1".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventStreamSpec {
    pub activity: Activity,
    /// Loading-order timestamps of the four template events.
    #[serde(default = "default_base")]
    pub base_timestamps: Vec<i64>,
    /// Every timestamp is shifted by a draw from `0..=max_shift`.
    #[serde(default)]
    pub max_shift: i64,
    /// `confusion[true][observed]`; labels without a row are never confused.
    #[serde(default)]
    pub confusion: BTreeMap<String, BTreeMap<String, f64>>,
    /// Probability of a spurious event after each template event.
    #[serde(default)]
    pub insertion_rate: f64,
    /// Probability that a template event is not observed.
    #[serde(default)]
    pub deletion_rate: f64,
    #[serde(default = "default_agent")]
    pub agent: String,
    #[serde(default)]
    pub seed: u64,
}

impl EventStreamSpec {
    pub fn clean(activity: Activity, seed: u64) -> EventStreamSpec {
        EventStreamSpec {
            activity,
            base_timestamps: default_base(),
            max_shift: 20,
            confusion: BTreeMap::new(),
            insertion_rate: 0.0,
            deletion_rate: 0.0,
            agent: default_agent(),
            seed,
        }
    }

    /// Each core label degrades to its ambiguous variant with probability `p`.
    pub fn with_confusion(mut self, p: f64) -> EventStreamSpec {
        self.confusion = LABELS
            .iter()
            .map(|l| {
                let amb = ambiguous_variant(l).expect("core label");
                (l.to_string(), BTreeMap::from([(l.to_string(), 1.0 - p), (amb.to_string(), p)]))
            })
            .collect();
        self
    }

    pub fn validate(&self) -> Result<(), StreamError> {
        let bad = |m: String| Err(StreamError::InvalidSpec(m));
        if self.base_timestamps.len() != LEAVES.len() || self.base_timestamps.iter().any(|t| *t < 0) {
            return bad(format!("need {} non-negative base timestamps", LEAVES.len()));
        }
        if self.max_shift < 0 {
            return bad("max_shift must be >= 0".into());
        }
        for (name, r) in [("insertion_rate", self.insertion_rate), ("deletion_rate", self.deletion_rate)] {
            if !(0.0..=1.0).contains(&r) {
                return bad(format!("{name} must be in [0, 1], got {r}"));
            }
        }
        for (from, row) in &self.confusion {
            let sum: f64 = row.values().sum();
            if row.values().any(|p| *p < 0.0) || (sum - 1.0).abs() > 1e-9 {
                return bad(format!("confusion row `{from}` must be non-negative and sum to 1, sums to {sum}"));
            }
        }
        Ok(())
    }
}

fn confuse(rng: &mut ChaCha8Rng, row: Option<&BTreeMap<String, f64>>, label: &str) -> String {
    let Some(row) = row else { return label.to_string() };
    let mut u: f64 = rng.random();
    for (to, p) in row {
        if u < *p {
            return to.clone();
        }
        u -= p;
    }
    row.keys().next_back().cloned().unwrap_or_else(|| label.to_string())
}

/// Events per the template, then confusion, deletions and insertions.
/// Confused events carry low confidence, between the leaf and projection
/// thresholds of the default configuration.
pub fn generate_stream(spec: &EventStreamSpec) -> Result<(DataSet, GroundTruth), StreamError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let shift = rng.random_range(0..=spec.max_shift);
    let (lo, hi) = (spec.base_timestamps.iter().min().unwrap(), spec.base_timestamps.iter().max().unwrap());
    // (timestamp, label, confidence, leaf)
    let mut raw: Vec<(i64, String, f64, Option<&str>)> = Vec::new();
    for (k, &base) in spec.base_timestamps.iter().enumerate() {
        let t = shift
            + match spec.activity {
                Activity::Unload => hi + lo - base,
                _ => base,
            };
        let (label, leaf) = match spec.activity {
            Activity::Distractor => (DISTRACTOR_LABELS[rng.random_range(0..DISTRACTOR_LABELS.len())].to_string(), None),
            _ => (LABELS[k].to_string(), Some(LEAVES[k])),
        };
        let observed = confuse(&mut rng, spec.confusion.get(&label), &label);
        let confidence = if observed == label { 1.0 } else { rng.random_range(0.15..0.35) };
        if !rng.random_bool(spec.deletion_rate) {
            raw.push((t, observed, confidence, leaf));
        }
        if rng.random_bool(spec.insertion_rate) {
            let pool = [CARRY, CONTACT, LOAD_MOTION, DEPART, MOTION, TOUCH, "walk", "wave"];
            let label = pool[rng.random_range(0..pool.len())].to_string();
            let at = shift + rng.random_range(0..=hi + STEP as i64);
            raw.push((at, label, rng.random_range(0.5..=1.0), None));
        }
    }
    raw.shuffle(&mut rng);
    raw.sort_by_key(|e| e.0);

    let mut mapping = Mapping::new();
    let mut data = Vec::with_capacity(raw.len());
    for (i, (t, label, confidence, leaf)) in raw.into_iter().enumerate() {
        let id = format!("e{i}");
        if let Some(leaf) = leaf {
            mapping.bind(leaf, id.clone());
        }
        let event = Event { timestamp: t, label, agent: spec.agent.clone() };
        data.push(Datum::new(id, Payload::Event(event), confidence));
    }
    let instances = if mapping.is_empty() {
        Vec::new()
    } else {
        vec![TruthInstance { label: spec.activity.label().into(), mapping }]
    };
    Ok((DataSet::new(Domain::Temporal, data)?, GroundTruth { instances }))
}

/// Mirror every timestamp within the stream's span.
pub fn reverse_stream(d: &DataSet) -> DataSet {
    let times = || d.data().iter().filter_map(|x| x.payload.as_event()).map(|e| e.timestamp);
    let (lo, hi) = (times().min().unwrap_or(0), times().max().unwrap_or(0));
    d.map_payloads(|p| match p {
        Payload::Event(e) => Payload::Event(Event { timestamp: hi + lo - e.timestamp, ..e.clone() }),
        other => other.clone(),
    })
    .expect("ids are unchanged")
}

/// The selected activity with the highest score, or [`NONE_LABEL`].
pub fn classify_stream(
    reg: &ModelRegistry,
    d: &DataSet,
    cfg: &SceneConfig,
) -> Result<(String, SceneInterpretation), WorkspaceError> {
    classify_stream_with(reg, d, cfg, Strategy::Projection)
}

/// [`classify_stream`] with an explicit search strategy.
pub fn classify_stream_with(
    reg: &ModelRegistry,
    d: &DataSet,
    cfg: &SceneConfig,
    strategy: Strategy,
) -> Result<(String, SceneInterpretation), WorkspaceError> {
    let scene = interpret_scene(reg, d, cfg, strategy)?;
    let label = scene
        .selected
        .iter()
        .max_by(|a, b| a.score().total_cmp(&b.score()).then_with(|| b.model.cmp(&a.model)))
        .map_or(NONE_LABEL.to_string(), |p| p.model.clone());
    Ok((label, scene))
}
