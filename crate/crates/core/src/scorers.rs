//! Relation scorers: the per-element functions that rate how well a tuple of
//! bound parts realizes an intended relation, and their inverses.
//!
//! Every kind is normalized to peak at 1.0 on its canonical configuration
//! and decays with a Gaussian kernel `exp(-(deviation / tolerance)^2)`.
//! Inversion (`predict_constraint`) returns the region an unbound part must
//! fall in for the relation to score at least 0.5, which is what top-down
//! projection searches.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{Domain, Event, Payload, Segment};

/// Score level at which constraint windows are cut.
pub const WINDOW_LEVEL: f64 = 0.5;

/// A normalized score in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Score(f64);

impl Score {
    pub const ZERO: Score = Score(0.0);
    pub const ONE: Score = Score(1.0);

    /// Clamps into `[0, 1]`; NaN maps to 0.
    pub fn new(value: f64) -> Score {
        if value.is_nan() {
            Score(0.0)
        } else {
            Score(value.clamp(0.0, 1.0))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}", self.0)
    }
}

/// A relation scorer as stored under `"scorer"` in a model document.
///
/// `args` name leaf elements in the owning element's subtree; the relation is
/// evaluated on the payloads bound to those leaves, in order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScorerSpec {
    /// Start of `b` relative to the start of `a`, in `a`'s frame (x along
    /// `a`, y to its left), measured in multiples of `a`'s length.
    RelativeLocation { args: Vec<String>, dx: f64, dy: f64, tolerance: f64 },
    /// `b` starts where `a` ends and turns by `turn` degrees.
    SmoothContinuation {
        args: Vec<String>,
        #[serde(default)]
        turn: f64,
        gap_tolerance: f64,
        angle_tolerance: f64,
    },
    /// `length(a) / length(b)`.
    LengthRatio { args: Vec<String>, ratio: f64, tolerance: f64 },
    /// Undirected orientation difference; symmetric in its arguments.
    Parallelism { args: Vec<String>, tolerance: f64 },
    /// `b` happens at least `gap` ticks after `a`; one-sided.
    Precedence { args: Vec<String>, gap: f64, tolerance: f64 },
    /// `b` happens `gap` ticks after `a`; two-sided.
    TimeGap { args: Vec<String>, gap: f64, tolerance: f64 },
    /// Categorical: 1 for a listed label, `partial[label]` for a partially
    /// acceptable one, 0 otherwise.
    LabelMatch {
        args: Vec<String>,
        labels: Vec<String>,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        partial: BTreeMap<String, f64>,
    },
    /// Weighted geometric mean of child relations.
    Conjunction { children: Vec<ScorerSpec>, weights: Vec<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScorerKind {
    RelativeLocation,
    SmoothContinuation,
    LengthRatio,
    Parallelism,
    Precedence,
    TimeGap,
    LabelMatch,
    Conjunction,
}

impl ScorerKind {
    pub const ALL: [ScorerKind; 8] = [
        ScorerKind::RelativeLocation,
        ScorerKind::SmoothContinuation,
        ScorerKind::LengthRatio,
        ScorerKind::Parallelism,
        ScorerKind::Precedence,
        ScorerKind::TimeGap,
        ScorerKind::LabelMatch,
        ScorerKind::Conjunction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScorerKind::RelativeLocation => "relative_location",
            ScorerKind::SmoothContinuation => "smooth_continuation",
            ScorerKind::LengthRatio => "length_ratio",
            ScorerKind::Parallelism => "parallelism",
            ScorerKind::Precedence => "precedence",
            ScorerKind::TimeGap => "time_gap",
            ScorerKind::LabelMatch => "label_match",
            ScorerKind::Conjunction => "conjunction",
        }
    }

    /// Fixed arity; `None` for the variadic conjunction.
    pub fn arity(self) -> Option<usize> {
        match self {
            ScorerKind::LabelMatch => Some(1),
            ScorerKind::Conjunction => None,
            _ => Some(2),
        }
    }

    /// Payload domain the kind reads; `None` for conjunction.
    pub fn domain(self) -> Option<Domain> {
        match self {
            ScorerKind::RelativeLocation
            | ScorerKind::SmoothContinuation
            | ScorerKind::LengthRatio
            | ScorerKind::Parallelism => Some(Domain::Glyph),
            ScorerKind::Precedence | ScorerKind::TimeGap | ScorerKind::LabelMatch => {
                Some(Domain::Temporal)
            }
            ScorerKind::Conjunction => None,
        }
    }
}

impl fmt::Display for ScorerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScorerError {
    #[error("{kind} expects {expected} parts, got {found}")]
    ArityMismatch { kind: ScorerKind, expected: usize, found: usize },
    #[error("{kind} needs {expected} payloads")]
    PayloadMismatch { kind: ScorerKind, expected: Domain },
    #[error("slot {slot} is out of range for {kind}")]
    SlotOutOfRange { kind: ScorerKind, slot: usize },
    #[error("slot {0} is already bound")]
    SlotAlreadyBound(usize),
    #[error("{0} needs at least one bound part to predict from")]
    NoBoundParts(ScorerKind),
    #[error("{kind} has no invertible form for slot {slot}")]
    NotInvertible { kind: ScorerKind, slot: usize },
}

impl ScorerSpec {
    pub fn kind(&self) -> ScorerKind {
        match self {
            ScorerSpec::RelativeLocation { .. } => ScorerKind::RelativeLocation,
            ScorerSpec::SmoothContinuation { .. } => ScorerKind::SmoothContinuation,
            ScorerSpec::LengthRatio { .. } => ScorerKind::LengthRatio,
            ScorerSpec::Parallelism { .. } => ScorerKind::Parallelism,
            ScorerSpec::Precedence { .. } => ScorerKind::Precedence,
            ScorerSpec::TimeGap { .. } => ScorerKind::TimeGap,
            ScorerSpec::LabelMatch { .. } => ScorerKind::LabelMatch,
            ScorerSpec::Conjunction { .. } => ScorerKind::Conjunction,
        }
    }

    /// Own argument list for non-conjunction kinds.
    fn own_args(&self) -> Option<&[String]> {
        match self {
            ScorerSpec::RelativeLocation { args, .. }
            | ScorerSpec::SmoothContinuation { args, .. }
            | ScorerSpec::LengthRatio { args, .. }
            | ScorerSpec::Parallelism { args, .. }
            | ScorerSpec::Precedence { args, .. }
            | ScorerSpec::TimeGap { args, .. }
            | ScorerSpec::LabelMatch { args, .. } => Some(args),
            ScorerSpec::Conjunction { .. } => None,
        }
    }

    /// The parts this relation reads, in order. For a conjunction: the
    /// distinct arguments of its children in order of first appearance.
    pub fn args(&self) -> Vec<&str> {
        match self.own_args() {
            Some(args) => args.iter().map(String::as_str).collect(),
            None => {
                let mut out: Vec<&str> = Vec::new();
                if let ScorerSpec::Conjunction { children, .. } = self {
                    for c in children {
                        for a in c.args() {
                            if !out.contains(&a) {
                                out.push(a);
                            }
                        }
                    }
                }
                out
            }
        }
    }

    /// Domain of the payloads this scorer reads, or `None` when it mixes
    /// domains (a validation failure) or is an empty conjunction.
    pub fn domain(&self) -> Option<Domain> {
        match self {
            ScorerSpec::Conjunction { children, .. } => {
                let domains: BTreeSet<Option<Domain>> = children.iter().map(|c| c.domain()).collect();
                match domains.len() {
                    1 => domains.into_iter().next().flatten(),
                    _ => None,
                }
            }
            other => other.kind().domain(),
        }
    }

    /// Parameter problems, as human-readable strings; empty when valid.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_problems(&mut out);
        out
    }

    fn collect_problems(&self, out: &mut Vec<String>) {
        let kind = self.kind();
        if let (Some(args), Some(arity)) = (self.own_args(), kind.arity()) {
            if args.len() != arity {
                out.push(format!("{kind} takes {arity} args, found {}", args.len()));
            }
        }
        let mut tol = |name: &str, v: f64| {
            if !(v.is_finite() && v > 0.0) {
                out.push(format!("{kind} {name} must be finite and > 0, found {v}"));
            }
        };
        match self {
            ScorerSpec::RelativeLocation { tolerance, .. }
            | ScorerSpec::Parallelism { tolerance, .. }
            | ScorerSpec::Precedence { tolerance, .. }
            | ScorerSpec::TimeGap { tolerance, .. } => tol("tolerance", *tolerance),
            ScorerSpec::SmoothContinuation { gap_tolerance, angle_tolerance, .. } => {
                tol("gap_tolerance", *gap_tolerance);
                tol("angle_tolerance", *angle_tolerance);
            }
            ScorerSpec::LengthRatio { ratio, tolerance, .. } => {
                tol("tolerance", *tolerance);
                tol("ratio", *ratio);
            }
            ScorerSpec::LabelMatch { labels, partial, .. } => {
                if labels.is_empty() {
                    out.push("label_match needs at least one label".into());
                }
                for (l, v) in partial {
                    if !(0.0..=1.0).contains(v) {
                        out.push(format!("label_match partial score for `{l}` outside [0, 1]"));
                    }
                }
            }
            ScorerSpec::Conjunction { children, weights } => {
                if children.len() < 2 {
                    out.push(format!("conjunction needs >= 2 children, found {}", children.len()));
                }
                if weights.len() != children.len() {
                    out.push(format!(
                        "conjunction has {} weights for {} children",
                        weights.len(),
                        children.len()
                    ));
                }
                if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                    out.push("conjunction weights must be > 0".into());
                }
                let sum: f64 = weights.iter().sum();
                if (sum - 1.0).abs() > 1e-9 {
                    out.push(format!("conjunction weights sum to {sum}, not 1"));
                }
                if self.domain().is_none() && !children.is_empty() {
                    out.push("conjunction mixes glyph and temporal relations".into());
                }
                for c in children {
                    c.collect_problems(out);
                }
            }
        }
    }
}

fn kernel(deviation: f64) -> f64 {
    (-(deviation * deviation)).exp()
}

/// Largest normalized deviation whose kernel value is still `>= level`.
fn radius_at(level: f64) -> f64 {
    if level >= 1.0 {
        0.0
    } else if level <= 0.0 {
        f64::INFINITY
    } else {
        (-level.ln()).sqrt()
    }
}

/// Wraps an angle difference into `(-180, 180]`.
pub fn wrap180(deg: f64) -> f64 {
    let r = deg.rem_euclid(360.0);
    if r > 180.0 {
        r - 360.0
    } else {
        r
    }
}

/// Undirected orientation difference in `[0, 90]`.
pub fn undirected_diff(a: f64, b: f64) -> f64 {
    let d = (b - a).rem_euclid(180.0);
    d.min(180.0 - d)
}

fn seg(kind: ScorerKind, p: &Payload) -> Result<&Segment, ScorerError> {
    p.as_segment().ok_or(ScorerError::PayloadMismatch { kind, expected: Domain::Glyph })
}

fn event(kind: ScorerKind, p: &Payload) -> Result<&Event, ScorerError> {
    p.as_event().ok_or(ScorerError::PayloadMismatch { kind, expected: Domain::Temporal })
}

/// Offset of `b`'s start in `a`'s frame, in units of `a`'s length.
pub fn local_offset(a: &Segment, b: &Segment) -> (f64, f64) {
    let (c, s) = a.direction();
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    ((dx * c + dy * s) / a.length, (-dx * s + dy * c) / a.length)
}

/// Evaluate a relation on fully bound parts, aligned with `spec.args()`.
pub fn eval_relation(spec: &ScorerSpec, parts: &[&Payload]) -> Result<Score, ScorerError> {
    let kind = spec.kind();
    let expected = spec.args().len();
    if parts.len() != expected {
        return Err(ScorerError::ArityMismatch { kind, expected, found: parts.len() });
    }
    let v = match spec {
        ScorerSpec::RelativeLocation { dx, dy, tolerance, .. } => {
            let (a, b) = (seg(kind, parts[0])?, seg(kind, parts[1])?);
            let (ox, oy) = local_offset(a, b);
            kernel((ox - dx).hypot(oy - dy) / tolerance)
        }
        ScorerSpec::SmoothContinuation { turn, gap_tolerance, angle_tolerance, .. } => {
            let (a, b) = (seg(kind, parts[0])?, seg(kind, parts[1])?);
            let (ex, ey) = a.end();
            let gap = (b.x - ex).hypot(b.y - ey) / a.length;
            let bend = wrap180(b.orientation - a.orientation - turn);
            kernel(gap / gap_tolerance) * kernel(bend / angle_tolerance)
        }
        ScorerSpec::LengthRatio { ratio, tolerance, .. } => {
            let (a, b) = (seg(kind, parts[0])?, seg(kind, parts[1])?);
            kernel((a.length / b.length - ratio) / tolerance)
        }
        ScorerSpec::Parallelism { tolerance, .. } => {
            let (a, b) = (seg(kind, parts[0])?, seg(kind, parts[1])?);
            kernel(undirected_diff(a.orientation, b.orientation) / tolerance)
        }
        ScorerSpec::Precedence { gap, tolerance, .. } => {
            let (a, b) = (event(kind, parts[0])?, event(kind, parts[1])?);
            let dt = (b.timestamp - a.timestamp) as f64;
            kernel((gap - dt).max(0.0) / tolerance)
        }
        ScorerSpec::TimeGap { gap, tolerance, .. } => {
            let (a, b) = (event(kind, parts[0])?, event(kind, parts[1])?);
            let dt = (b.timestamp - a.timestamp) as f64;
            kernel((dt - gap) / tolerance)
        }
        ScorerSpec::LabelMatch { labels, partial, .. } => {
            let e = event(kind, parts[0])?;
            if labels.iter().any(|l| *l == e.label) {
                1.0
            } else {
                partial.get(&e.label).copied().unwrap_or(0.0)
            }
        }
        ScorerSpec::Conjunction { children, weights } => {
            let names = spec.args();
            let mut log_sum = 0.0;
            for (child, w) in children.iter().zip(weights) {
                let child_parts: Vec<&Payload> = child
                    .args()
                    .iter()
                    .map(|a| parts[names.iter().position(|n| n == a).expect("child arg in union")])
                    .collect();
                let s = eval_relation(child, &child_parts)?.value();
                if s <= 0.0 {
                    return Ok(Score::ZERO);
                }
                log_sum += w * s.ln();
            }
            log_sum.exp()
        }
    };
    Ok(Score::new(v))
}

/// Closed interval with optional open ends.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl Interval {
    pub const UNBOUNDED: Interval = Interval { lo: None, hi: None };

    pub fn new(lo: f64, hi: f64) -> Interval {
        Interval { lo: Some(lo), hi: Some(hi) }
    }

    pub fn around(center: f64, half_width: f64) -> Interval {
        Interval::new(center - half_width, center + half_width)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo.is_none_or(|lo| v >= lo - 1e-9) && self.hi.is_none_or(|hi| v <= hi + 1e-9)
    }

    pub fn is_empty(&self) -> bool {
        matches!((self.lo, self.hi), (Some(lo), Some(hi)) if lo > hi)
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let lo = match (self.lo, other.lo) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let hi = match (self.hi, other.hi) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Interval { lo, hi }
    }
}

/// Angular window: `angle` is admitted when its circular distance from
/// `center` modulo `period` is at most `half_width`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleWindow {
    pub center: f64,
    pub half_width: f64,
    pub period: f64,
}

impl AngleWindow {
    pub fn contains(&self, angle: f64) -> bool {
        let d = (angle - self.center).rem_euclid(self.period);
        d.min(self.period - d) <= self.half_width + 1e-9
    }
}

/// Disk of admissible start points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub x: f64,
    pub y: f64,
    pub radius: f64,
}

/// Region of payload space a part must fall in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "domain", rename_all = "lowercase")]
pub enum Window {
    Glyph {
        x: Interval,
        y: Interval,
        /// Start-point disks (all must hold); the x/y box bounds them.
        disks: Vec<Disk>,
        orientation: Vec<AngleWindow>,
        length: Interval,
    },
    Temporal {
        timestamp: Interval,
        labels: Option<BTreeSet<String>>,
    },
}

impl Window {
    pub fn glyph() -> Window {
        Window::Glyph {
            x: Interval::UNBOUNDED,
            y: Interval::UNBOUNDED,
            disks: Vec::new(),
            orientation: Vec::new(),
            length: Interval::UNBOUNDED,
        }
    }

    pub fn temporal() -> Window {
        Window::Temporal { timestamp: Interval::UNBOUNDED, labels: None }
    }

    fn glyph_disk(d: Disk) -> Window {
        Window::Glyph {
            x: Interval::around(d.x, d.radius),
            y: Interval::around(d.y, d.radius),
            disks: vec![d],
            orientation: Vec::new(),
            length: Interval::UNBOUNDED,
        }
    }

    pub fn contains(&self, p: &Payload) -> bool {
        match (self, p) {
            (Window::Glyph { x, y, disks, orientation, length }, Payload::Segment(s)) => {
                x.contains(s.x)
                    && y.contains(s.y)
                    && length.contains(s.length)
                    && disks.iter().all(|d| (s.x - d.x).hypot(s.y - d.y) <= d.radius + 1e-9)
                    && orientation.iter().all(|w| w.contains(s.orientation))
            }
            (Window::Temporal { timestamp, labels }, Payload::Event(e)) => {
                timestamp.contains(e.timestamp as f64)
                    && labels.as_ref().is_none_or(|ls| ls.contains(&e.label))
            }
            _ => false,
        }
    }

    /// True when provably nothing can fall inside.
    pub fn is_empty(&self) -> bool {
        match self {
            Window::Glyph { x, y, length, orientation, .. } => {
                x.is_empty()
                    || y.is_empty()
                    || length.is_empty()
                    || orientation.iter().enumerate().any(|(i, a)| {
                        orientation[i + 1..].iter().any(|b| {
                            a.period == b.period && {
                                let d = (a.center - b.center).rem_euclid(a.period);
                                d.min(a.period - d) > a.half_width + b.half_width
                            }
                        })
                    })
            }
            Window::Temporal { timestamp, labels } => {
                timestamp.is_empty() || labels.as_ref().is_some_and(|l| l.is_empty())
            }
        }
    }

    pub fn intersect(&self, other: &Window) -> Window {
        match (self, other) {
            (
                Window::Glyph { x, y, disks, orientation, length },
                Window::Glyph { x: x2, y: y2, disks: d2, orientation: o2, length: l2 },
            ) => Window::Glyph {
                x: x.intersect(x2),
                y: y.intersect(y2),
                disks: disks.iter().chain(d2).copied().collect(),
                orientation: orientation.iter().chain(o2).copied().collect(),
                length: length.intersect(l2),
            },
            (
                Window::Temporal { timestamp, labels },
                Window::Temporal { timestamp: t2, labels: l2 },
            ) => Window::Temporal {
                timestamp: timestamp.intersect(t2),
                labels: match (labels, l2) {
                    (Some(a), Some(b)) => Some(a.intersection(b).cloned().collect()),
                    (a, b) => a.clone().or_else(|| b.clone()),
                },
            },
            // Mixed domains admit nothing.
            (Window::Glyph { .. }, Window::Temporal { .. }) | (Window::Temporal { .. }, Window::Glyph { .. }) => {
                Window::Temporal { timestamp: Interval::new(1.0, 0.0), labels: None }
            }
        }
    }
}

/// Output of `predict_constraint`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    /// Contains every payload for the slot that lets the relation reach
    /// `level` given the bound parts.
    pub window: Window,
    /// Upper bound on the relation score reachable inside the window.
    pub strength: f64,
    pub level: f64,
}

/// Predict where the unbound part `slot` must lie for `spec` to score at
/// least [`WINDOW_LEVEL`], given the other bound parts (aligned with
/// `spec.args()`).
pub fn predict_constraint(
    spec: &ScorerSpec,
    bound: &[Option<&Payload>],
    slot: usize,
) -> Result<Constraint, ScorerError> {
    let kind = spec.kind();
    let n = spec.args().len();
    if bound.len() != n {
        return Err(ScorerError::ArityMismatch { kind, expected: n, found: bound.len() });
    }
    if slot >= n {
        return Err(ScorerError::SlotOutOfRange { kind, slot });
    }
    if bound[slot].is_some() {
        return Err(ScorerError::SlotAlreadyBound(slot));
    }
    let conjunction = matches!(spec, ScorerSpec::Conjunction { .. });
    if n > 1 && !conjunction && bound.iter().all(Option::is_none) {
        return Err(ScorerError::NoBoundParts(kind));
    }
    let (window, strength) = predict_at(spec, bound, slot, WINDOW_LEVEL)?;
    let strength = if window.is_empty() { 0.0 } else { strength };
    Ok(Constraint { window, strength, level: WINDOW_LEVEL })
}

fn predict_at(
    spec: &ScorerSpec,
    bound: &[Option<&Payload>],
    slot: usize,
    level: f64,
) -> Result<(Window, f64), ScorerError> {
    let kind = spec.kind();
    let r = radius_at(level);
    let other = |i: usize| bound[i].ok_or(ScorerError::NotInvertible { kind, slot });
    let window = match spec {
        ScorerSpec::RelativeLocation { dx, dy, tolerance, .. } => {
            if slot == 0 {
                // a's frame is unknown without a's own orientation and length.
                return Err(ScorerError::NotInvertible { kind, slot });
            }
            let a = seg(kind, other(0)?)?;
            let (c, s) = a.direction();
            let (ox, oy) = (dx * a.length, dy * a.length);
            Window::glyph_disk(Disk {
                x: a.x + ox * c - oy * s,
                y: a.y + ox * s + oy * c,
                radius: r * tolerance * a.length,
            })
        }
        ScorerSpec::SmoothContinuation { turn, gap_tolerance, angle_tolerance, .. } => {
            // Product of two kernels >= level implies each factor >= level.
            if slot == 1 {
                let a = seg(kind, other(0)?)?;
                let (ex, ey) = a.end();
                let mut w = Window::glyph_disk(Disk { x: ex, y: ey, radius: r * gap_tolerance * a.length });
                if let Window::Glyph { orientation, .. } = &mut w {
                    orientation.push(AngleWindow {
                        center: a.orientation + turn,
                        half_width: r * angle_tolerance,
                        period: 360.0,
                    });
                }
                w
            } else {
                let b = seg(kind, other(1)?)?;
                let mut w = Window::glyph();
                if let Window::Glyph { orientation, .. } = &mut w {
                    orientation.push(AngleWindow {
                        center: b.orientation - turn,
                        half_width: r * angle_tolerance,
                        period: 360.0,
                    });
                }
                w
            }
        }
        ScorerSpec::LengthRatio { ratio, tolerance, .. } => {
            let (lo_f, hi_f) = (ratio - r * tolerance, ratio + r * tolerance);
            let length = if slot == 1 {
                let a = seg(kind, other(0)?)?;
                Interval { lo: Some(a.length / hi_f), hi: (lo_f > 0.0).then(|| a.length / lo_f) }
            } else {
                let b = seg(kind, other(1)?)?;
                Interval::new(lo_f.max(0.0) * b.length, hi_f * b.length)
            };
            let mut w = Window::glyph();
            if let Window::Glyph { length: l, .. } = &mut w {
                *l = length;
            }
            w
        }
        ScorerSpec::Parallelism { tolerance, .. } => {
            let o = seg(kind, other(1 - slot)?)?;
            let mut w = Window::glyph();
            if let Window::Glyph { orientation, .. } = &mut w {
                orientation.push(AngleWindow {
                    center: o.orientation,
                    half_width: r * tolerance,
                    period: 180.0,
                });
            }
            w
        }
        ScorerSpec::Precedence { gap, tolerance, .. } => {
            let timestamp = if slot == 1 {
                let a = event(kind, other(0)?)?;
                Interval { lo: Some(a.timestamp as f64 + gap - r * tolerance), hi: None }
            } else {
                let b = event(kind, other(1)?)?;
                Interval { lo: None, hi: Some(b.timestamp as f64 - gap + r * tolerance) }
            };
            Window::Temporal { timestamp, labels: None }
        }
        ScorerSpec::TimeGap { gap, tolerance, .. } => {
            let center = if slot == 1 {
                event(kind, other(0)?)?.timestamp as f64 + gap
            } else {
                event(kind, other(1)?)?.timestamp as f64 - gap
            };
            Window::Temporal { timestamp: Interval::around(center, r * tolerance), labels: None }
        }
        ScorerSpec::LabelMatch { labels, partial, .. } => {
            let mut set: BTreeSet<String> = labels.iter().cloned().collect();
            set.extend(partial.iter().filter(|(_, v)| **v >= level).map(|(l, _)| l.clone()));
            Window::Temporal { timestamp: Interval::UNBOUNDED, labels: Some(set) }
        }
        ScorerSpec::Conjunction { children, weights } => {
            let names = spec.args();
            let slot_name = names[slot];
            let mut window: Option<Window> = None;
            let mut strength = 1.0;
            for (child, w) in children.iter().zip(weights) {
                let child_args = child.args();
                let child_bound: Vec<Option<&Payload>> = child_args
                    .iter()
                    .map(|a| bound[names.iter().position(|n| n == a).expect("child arg in union")])
                    .collect();
                match child_args.iter().position(|a| *a == slot_name) {
                    None => {
                        if let Some(parts) = child_bound.iter().copied().collect::<Option<Vec<_>>>() {
                            strength *= eval_relation(child, &parts)?.value().powf(*w);
                        }
                    }
                    Some(child_slot) => {
                        let others_bound = child_bound
                            .iter()
                            .enumerate()
                            .all(|(i, b)| i == child_slot || b.is_some());
                        if !others_bound {
                            continue;
                        }
                        // Π s_c^w_c >= level forces s_c >= level^(1 / w_c).
                        match predict_at(child, &child_bound, child_slot, level.powf(1.0 / w)) {
                            Ok((cw, _)) => {
                                window = Some(match window {
                                    None => cw,
                                    Some(prev) => prev.intersect(&cw),
                                })
                            }
                            Err(ScorerError::NotInvertible { .. }) => {}
                            Err(e) => return Err(e),
                        }
                    }
                }
            }
            let window = window.ok_or(if bound.iter().all(Option::is_none) {
                ScorerError::NoBoundParts(kind)
            } else {
                ScorerError::NotInvertible { kind, slot }
            })?;
            return Ok((window, strength));
        }
    };
    Ok((window, 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamSchema {
    pub name: &'static str,
    pub unit: &'static str,
    pub description: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub kind: ScorerKind,
    /// `None` for the variadic conjunction.
    pub arity: Option<usize>,
    pub domain: Option<Domain>,
    pub params: Vec<ParamSchema>,
}

const fn p(name: &'static str, unit: &'static str, description: &'static str) -> ParamSchema {
    ParamSchema { name, unit, description }
}

/// Machine-readable description of every scorer kind.
pub fn list_catalog() -> Vec<CatalogEntry> {
    ScorerKind::ALL
        .iter()
        .map(|&kind| {
            let params = match kind {
                ScorerKind::RelativeLocation => vec![
                    p("dx", "a-lengths", "offset of b's start along a"),
                    p("dy", "a-lengths", "offset of b's start left of a"),
                    p("tolerance", "a-lengths", "kernel width on the offset error"),
                ],
                ScorerKind::SmoothContinuation => vec![
                    p("turn", "degrees", "expected change of direction from a to b"),
                    p("gap_tolerance", "a-lengths", "kernel width on the end-to-start gap"),
                    p("angle_tolerance", "degrees", "kernel width on the turn error"),
                ],
                ScorerKind::LengthRatio => vec![
                    p("ratio", "1", "expected length(a) / length(b)"),
                    p("tolerance", "1", "kernel width on the ratio error"),
                ],
                ScorerKind::Parallelism => {
                    vec![p("tolerance", "degrees", "kernel width on the undirected angle")]
                }
                ScorerKind::Precedence => vec![
                    p("gap", "ticks", "minimum delay of b after a"),
                    p("tolerance", "ticks", "kernel width on the shortfall"),
                ],
                ScorerKind::TimeGap => vec![
                    p("gap", "ticks", "expected delay of b after a"),
                    p("tolerance", "ticks", "kernel width on the delay error"),
                ],
                ScorerKind::LabelMatch => vec![
                    p("labels", "label[]", "labels scoring 1"),
                    p("partial", "label->score", "labels scoring partially"),
                ],
                ScorerKind::Conjunction => vec![
                    p("children", "scorer[]", "at least two child relations"),
                    p("weights", "1[]", "positive weights summing to 1"),
                ],
            };
            CatalogEntry { kind, arity: kind.arity(), domain: kind.domain(), params }
        })
        .collect()
}
