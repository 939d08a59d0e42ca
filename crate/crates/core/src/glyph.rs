//! Letters built from directed line segments.
//!
//! Each letter is a handful of strokes and each stroke is a two-segment
//! polyline, so every letter model has three levels: segment slots, strokes
//! (smooth continuation and length ratio of the two segments), and the
//! letter (where each stroke sits relative to the others). All relation
//! parameters are measured on the canonical drawing, so a noise-free
//! rendering of a letter scores exactly 1 under its own model.
//!
//! Horizontal strokes run left to right and vertical strokes bottom to top.
//! `V` reuses the right leg of `A` and the upper arm of `K`: with `K`
//! placed by [`ak_overlap_spec`], the two letters contain a complete `V`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{DataError, DataSet, Datum, Domain, Payload, Segment};
use crate::metrics::{GroundTruth, TruthInstance};
use crate::model::{Element, Level, Mapping, Model};
use crate::scorers::{local_offset, wrap180, ScorerSpec};
use crate::workspace::{ModelRegistry, SceneInterpretation};

type Point = (f64, f64);

/// A two-segment polyline in letter coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct StrokeShape {
    pub name: &'static str,
    pub points: [Point; 3],
}

impl StrokeShape {
    pub fn segments(&self) -> [Segment; 2] {
        [Segment::between(self.points[0], self.points[1]), Segment::between(self.points[1], self.points[2])]
    }
}

/// Canonical drawing of a letter, about 3 wide and 4 tall. `O` is taller
/// above its widest point than below, so no relabeling of its strokes
/// reproduces the drawing.
#[derive(Clone, Debug, PartialEq)]
pub struct LetterShape {
    pub letter: &'static str,
    pub strokes: Vec<StrokeShape>,
    /// Stroke pairs drawn parallel.
    pub parallel: Vec<(usize, usize)>,
}

fn stroke(name: &'static str, a: Point, b: Point, c: Point) -> StrokeShape {
    StrokeShape { name, points: [a, b, c] }
}

fn straight(name: &'static str, a: Point, c: Point) -> StrokeShape {
    stroke(name, a, ((a.0 + c.0) / 2.0, (a.1 + c.1) / 2.0), c)
}

/// Every shipped letter, in alphabetical order.
pub fn letter_shapes() -> Vec<LetterShape> {
    let ring: Vec<Point> = (0..8)
        .map(|k| {
            let t = (45.0 * k as f64).to_radians();
            let ry = if k < 4 { 2.1 } else { 1.9 };
            (1.5 + 1.5 * t.cos(), 1.9 + ry * t.sin())
        })
        .collect();
    let arc = |name, k: usize| stroke(name, ring[k], ring[k + 1], ring[(k + 2) % 8]);
    vec![
        LetterShape {
            letter: "A",
            strokes: vec![
                straight("left", (0.0, 0.0), (1.5, 4.0)),
                straight("right", (1.5, 4.0), (3.0, 0.0)),
                straight("bar", (0.75, 2.0), (2.25, 2.0)),
            ],
            parallel: vec![],
        },
        LetterShape {
            letter: "E",
            strokes: vec![
                straight("stem", (0.0, 0.0), (0.0, 4.0)),
                straight("top", (0.0, 4.0), (2.5, 4.0)),
                straight("middle", (0.0, 2.0), (2.0, 2.0)),
                straight("bottom", (0.0, 0.0), (2.5, 0.0)),
            ],
            parallel: vec![(1, 2), (2, 3), (1, 3)],
        },
        LetterShape {
            letter: "F",
            strokes: vec![
                straight("stem", (0.0, 0.0), (0.0, 4.0)),
                straight("top", (0.0, 4.0), (2.5, 4.0)),
                straight("middle", (0.0, 2.0), (2.0, 2.0)),
            ],
            parallel: vec![(1, 2)],
        },
        LetterShape {
            letter: "H",
            strokes: vec![
                straight("left", (0.0, 0.0), (0.0, 4.0)),
                straight("right", (2.5, 0.0), (2.5, 4.0)),
                straight("bar", (0.0, 2.0), (2.5, 2.0)),
            ],
            parallel: vec![(0, 1)],
        },
        LetterShape {
            letter: "I",
            strokes: vec![
                straight("top", (0.0, 4.0), (2.0, 4.0)),
                straight("stem", (1.0, 0.0), (1.0, 4.0)),
                straight("bottom", (0.0, 0.0), (2.0, 0.0)),
            ],
            parallel: vec![(0, 2)],
        },
        LetterShape {
            letter: "K",
            strokes: vec![
                straight("stem", (0.0, 0.0), (0.0, 4.0)),
                straight("upper", (0.0, 1.5), (2.0, 4.0)),
                straight("lower", (0.0, 1.5), (2.0, 0.0)),
            ],
            parallel: vec![],
        },
        LetterShape {
            letter: "L",
            strokes: vec![straight("stem", (0.0, 0.0), (0.0, 4.0)), straight("bottom", (0.0, 0.0), (2.0, 0.0))],
            parallel: vec![],
        },
        LetterShape {
            letter: "O",
            strokes: vec![arc("east", 0), arc("north", 2), arc("west", 4), arc("south", 6)],
            parallel: vec![],
        },
        LetterShape {
            letter: "T",
            strokes: vec![straight("top", (0.0, 4.0), (3.0, 4.0)), straight("stem", (1.5, 0.0), (1.5, 4.0))],
            parallel: vec![],
        },
        LetterShape {
            letter: "V",
            strokes: vec![straight("left", (0.0, 4.0), (1.5, 0.0)), straight("right", (1.5, 0.0), (3.5, 2.5))],
            parallel: vec![],
        },
        LetterShape {
            letter: "X",
            strokes: vec![straight("rising", (0.0, 0.0), (3.0, 4.0)), straight("falling", (0.0, 4.0), (3.0, 0.0))],
            parallel: vec![],
        },
    ]
}

pub fn letter_shape(letter: &str) -> Option<LetterShape> {
    letter_shapes().into_iter().find(|s| s.letter == letter)
}

/// Relation tolerances shared by every letter model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlyphTolerances {
    /// Start-point offsets, in multiples of the reference segment's length.
    pub location: f64,
    /// Location tolerance grows by this fraction per unit of offset, since
    /// orientation error in the reference segment is amplified with distance.
    pub location_growth: f64,
    /// Gap between consecutive segments of a stroke, same unit.
    pub gap: f64,
    /// Degrees.
    pub angle: f64,
    pub length_ratio: f64,
    /// Degrees.
    pub parallel: f64,
}

impl Default for GlyphTolerances {
    fn default() -> Self {
        GlyphTolerances { location: 0.2, location_growth: 0.5, gap: 0.2, angle: 15.0, length_ratio: 0.3, parallel: 8.0 }
    }
}

pub fn leaf_id(stroke: &str, segment: usize) -> String {
    format!("{stroke}_{segment}")
}

/// Three-level model of a stroke drawing, parameters read off the drawing.
pub fn shape_model(name: &str, strokes: &[StrokeShape], parallel: &[(usize, usize)], tol: &GlyphTolerances) -> Model {
    let segs: Vec<[Segment; 2]> = strokes.iter().map(StrokeShape::segments).collect();
    let mut leaves = Vec::new();
    let mut stroke_elems = Vec::new();
    for (s, [a, b]) in strokes.iter().zip(&segs) {
        let (l0, l1) = (leaf_id(s.name, 0), leaf_id(s.name, 1));
        leaves.push(Element::slot(&l0));
        leaves.push(Element::slot(&l1));
        let args = vec![l0.clone(), l1.clone()];
        let scorer = ScorerSpec::Conjunction {
            children: vec![
                ScorerSpec::SmoothContinuation {
                    args: args.clone(),
                    turn: wrap180(b.orientation - a.orientation),
                    gap_tolerance: tol.gap,
                    angle_tolerance: tol.angle,
                },
                ScorerSpec::LengthRatio { args, ratio: a.length / b.length, tolerance: tol.length_ratio },
            ],
            weights: vec![0.5, 0.5],
        };
        stroke_elems.push(Element::composite(s.name, &[&l0, &l1], scorer));
    }

    let mut children = Vec::new();
    for (i, si) in strokes.iter().enumerate() {
        for (j, sj) in strokes.iter().enumerate() {
            if i == j {
                continue;
            }
            for k in 0..2 {
                let (dx, dy) = local_offset(&segs[i][0], &segs[j][k]);
                children.push(ScorerSpec::RelativeLocation {
                    args: vec![leaf_id(si.name, 0), leaf_id(sj.name, k)],
                    dx,
                    dy,
                    tolerance: tol.location * (1.0 + tol.location_growth * dx.hypot(dy)),
                });
            }
        }
    }
    for w in strokes.windows(2).zip(segs.windows(2)) {
        let ((s, t), (a, b)) = ((&w.0[0], &w.0[1]), (&w.1[0][0], &w.1[1][0]));
        children.push(ScorerSpec::LengthRatio {
            args: vec![leaf_id(s.name, 0), leaf_id(t.name, 0)],
            ratio: a.length / b.length,
            tolerance: tol.length_ratio,
        });
    }
    for &(i, j) in parallel {
        children.push(ScorerSpec::Parallelism {
            args: vec![leaf_id(strokes[i].name, 0), leaf_id(strokes[j].name, 0)],
            tolerance: tol.parallel,
        });
    }
    let weights = vec![1.0 / children.len() as f64; children.len()];
    let names: Vec<&str> = strokes.iter().map(|s| s.name).collect();
    let top = Element::composite("letter", &names, ScorerSpec::Conjunction { children, weights });
    Model {
        name: name.to_string(),
        levels: vec![
            Level { index: 1, elements: leaves },
            Level { index: 2, elements: stroke_elems },
            Level { index: 3, elements: vec![top] },
        ],
    }
}

pub fn letter_model(shape: &LetterShape, tol: &GlyphTolerances) -> Model {
    shape_model(shape.letter, &shape.strokes, &shape.parallel, tol)
}

/// Every shipped letter as a model.
pub fn build_glyph_library() -> ModelRegistry {
    let tol = GlyphTolerances::default();
    ModelRegistry::new(letter_shapes().iter().map(|s| letter_model(s, &tol)).collect())
        .expect("shipped letters are valid")
}

#[derive(Debug, Error)]
pub enum GlyphError {
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("invalid scene spec: {0}")]
    InvalidSpec(String),
    #[error("invalid noise parameters: {0}")]
    InvalidNoise(String),
    #[error("render unsupported for domain {0}")]
    UnsupportedDomain(Domain),
    #[error("binding references unknown datum `{0}`")]
    DanglingBinding(String),
    #[error(transparent)]
    Data(#[from] DataError),
}

fn one() -> f64 {
    1.0
}

/// One letter instance: canonical drawing scaled, rotated about its origin,
/// then moved to `(x, y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LetterPlacement {
    pub letter: String,
    pub x: f64,
    pub y: f64,
    #[serde(default = "one")]
    pub scale: f64,
    /// Degrees, counterclockwise.
    #[serde(default)]
    pub rotation: f64,
}

impl LetterPlacement {
    pub fn new(letter: &str, x: f64, y: f64) -> LetterPlacement {
        LetterPlacement { letter: letter.into(), x, y, scale: 1.0, rotation: 0.0 }
    }

    fn apply(&self, p: Point) -> Point {
        let (s, c) = self.rotation.to_radians().sin_cos();
        (self.x + self.scale * (c * p.0 - s * p.1), self.y + self.scale * (s * p.0 + c * p.1))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlyphSceneSpec {
    pub letters: Vec<LetterPlacement>,
    /// Width and height of the area clutter is drawn in.
    pub extent: [f64; 2],
}

impl GlyphSceneSpec {
    pub fn validate(&self) -> Result<(), GlyphError> {
        for p in &self.letters {
            if letter_shape(&p.letter).is_none() {
                return Err(GlyphError::UnknownLetter(p.letter.clone()));
            }
            if !(p.scale > 0.0) {
                return Err(GlyphError::InvalidSpec(format!("scale of `{}` must be > 0", p.letter)));
            }
        }
        if !(self.extent[0] > 0.0 && self.extent[1] > 0.0) {
            return Err(GlyphError::InvalidSpec("extent must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseParams {
    /// Std. deviation of each polyline point, grid units.
    pub jitter: f64,
    /// Probability that a letter segment is not observed.
    pub dropout: f64,
    /// Random segments added to the scene.
    pub clutter: usize,
    /// Confidence is `1 - |N(0, confidence_sigma)|`, clamped to `[0, 1]`.
    pub confidence_sigma: f64,
    /// Confidence overrides keyed by `"<instance>:<leaf>"`.
    pub overrides: BTreeMap<String, f64>,
    pub seed: u64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams { jitter: 0.0, dropout: 0.0, clutter: 0, confidence_sigma: 0.0, overrides: BTreeMap::new(), seed: 0 }
    }
}

impl NoiseParams {
    pub fn validate(&self) -> Result<(), GlyphError> {
        let ok = self.jitter >= 0.0
            && self.confidence_sigma >= 0.0
            && (0.0..=1.0).contains(&self.dropout)
            && self.overrides.values().all(|c| (0.0..=1.0).contains(c));
        if ok {
            Ok(())
        } else {
            Err(GlyphError::InvalidNoise(format!("{self:?}")))
        }
    }
}

pub(crate) fn sample_confidence(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 1.0;
    }
    let n = Normal::new(0.0, sigma).expect("sigma > 0").sample(rng);
    (1.0 - n.abs()).clamp(0.0, 1.0)
}

fn jittered(rng: &mut ChaCha8Rng, p: Point, sigma: f64) -> Point {
    if sigma == 0.0 {
        return p;
    }
    let n = Normal::new(0.0, sigma).expect("sigma > 0");
    (p.0 + n.sample(rng), p.1 + n.sample(rng))
}

/// Render `spec` as segment data and the mapping each letter induces.
/// Dropped segments are absent from both.
pub fn generate_scene(spec: &GlyphSceneSpec, noise: &NoiseParams) -> Result<(DataSet, GroundTruth), GlyphError> {
    spec.validate()?;
    noise.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let mut items: Vec<(Segment, f64, Option<(usize, String)>)> = Vec::new();
    for (k, placement) in spec.letters.iter().enumerate() {
        let shape = letter_shape(&placement.letter).expect("validated");
        for s in &shape.strokes {
            let pts: Vec<Point> = s.points.iter().map(|p| jittered(&mut rng, placement.apply(*p), noise.jitter)).collect();
            for seg in 0..2 {
                let dropped = rng.random_bool(noise.dropout);
                let conf = sample_confidence(&mut rng, noise.confidence_sigma);
                if dropped {
                    continue;
                }
                let leaf = leaf_id(s.name, seg);
                let conf = noise.overrides.get(&format!("{k}:{leaf}")).copied().unwrap_or(conf);
                items.push((Segment::between(pts[seg], pts[seg + 1]), conf, Some((k, leaf))));
            }
        }
    }
    for _ in 0..noise.clutter {
        let seg = Segment {
            x: rng.random_range(0.0..spec.extent[0]),
            y: rng.random_range(0.0..spec.extent[1]),
            orientation: rng.random_range(-180.0..180.0),
            length: rng.random_range(0.5..2.0),
        };
        let conf = sample_confidence(&mut rng, noise.confidence_sigma);
        items.push((seg, conf, None));
    }
    items.shuffle(&mut rng);

    let mut mappings: Vec<Mapping> = vec![Mapping::new(); spec.letters.len()];
    let mut data = Vec::with_capacity(items.len());
    for (i, (seg, conf, owner)) in items.into_iter().enumerate() {
        let id = format!("s{i}");
        if let Some((k, leaf)) = owner {
            mappings[k].bind(leaf, id.clone());
        }
        data.push(Datum::new(id, Payload::Segment(seg), conf));
    }
    let instances = spec
        .letters
        .iter()
        .zip(mappings)
        .filter(|(_, m)| !m.is_empty())
        .map(|(p, mapping)| TruthInstance { label: p.letter.clone(), mapping })
        .collect();
    Ok((DataSet::new(Domain::Glyph, data)?, GroundTruth { instances }))
}

/// `A` at `(x, y)` with `K` overlapping its lower right so that the right
/// leg of `A` and the upper arm of `K` form a `V`.
pub fn ak_overlap_spec(x: f64, y: f64, scale: f64, rotation: f64) -> GlyphSceneSpec {
    let a = LetterPlacement { letter: "A".into(), x, y, scale, rotation };
    let (kx, ky) = a.apply((3.0, -1.5));
    GlyphSceneSpec {
        letters: vec![a, LetterPlacement { letter: "K".into(), x: kx, y: ky, scale, rotation }],
        extent: [12.0, 12.0],
    }
}

/// Random scenes: `letters` letters drawn from `pool`, side by side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlyphFamily {
    pub pool: Vec<String>,
    #[serde(default = "default_letters")]
    pub letters: usize,
    #[serde(default = "default_scale")]
    pub scale: [f64; 2],
    #[serde(default)]
    pub rotation: [f64; 2],
}

fn default_letters() -> usize {
    1
}

fn default_scale() -> [f64; 2] {
    [1.0, 1.0]
}

impl GlyphFamily {
    pub fn all_letters() -> GlyphFamily {
        GlyphFamily {
            pool: letter_shapes().iter().map(|s| s.letter.to_string()).collect(),
            letters: 1,
            scale: [0.8, 1.2],
            rotation: [-15.0, 15.0],
        }
    }

    pub fn validate(&self) -> Result<(), GlyphError> {
        if self.pool.is_empty() {
            return Err(GlyphError::InvalidSpec("empty letter pool".into()));
        }
        if let Some(bad) = self.pool.iter().find(|l| letter_shape(l).is_none()) {
            return Err(GlyphError::UnknownLetter(bad.clone()));
        }
        if !(self.scale[0] > 0.0 && self.scale[0] <= self.scale[1]) || self.rotation[0] > self.rotation[1] {
            return Err(GlyphError::InvalidSpec("scale and rotation ranges must be ordered, scale > 0".into()));
        }
        Ok(())
    }

    pub fn sample(&self, seed: u64) -> GlyphSceneSpec {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let range = |rng: &mut ChaCha8Rng, r: [f64; 2]| if r[0] < r[1] { rng.random_range(r[0]..r[1]) } else { r[0] };
        let letters: Vec<LetterPlacement> = (0..self.letters)
            .map(|k| {
                let letter = self.pool[rng.random_range(0..self.pool.len())].clone();
                let scale = range(&mut rng, self.scale);
                let rotation = range(&mut rng, self.rotation);
                let x = 2.0 + 7.0 * k as f64 + rng.random_range(0.0..1.0);
                let y = 2.0 + rng.random_range(0.0..1.0);
                LetterPlacement { letter, x, y, scale, rotation }
            })
            .collect();
        GlyphSceneSpec { letters, extent: [7.0 * self.letters as f64 + 4.0, 10.0] }
    }
}

/// A closed ring of chords around an irregular ellipse, with some clutter.
/// Not drawn from any letter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RingParams {
    pub chords: usize,
    /// Semi-axis range, grid units.
    pub radius: [f64; 2],
    /// Range of the ratio between the two semi-axes.
    pub aspect: [f64; 2],
    /// Relative radial noise per vertex.
    pub irregularity: f64,
    /// Angular noise per vertex, degrees.
    pub angle_noise: f64,
    /// Largest offset of the vertex pattern from the ellipse axes, degrees.
    pub phase: f64,
    pub clutter: usize,
    pub seed: u64,
}

impl Default for RingParams {
    fn default() -> Self {
        RingParams {
            chords: 8,
            radius: [1.5, 3.0],
            aspect: [1.2, 1.45],
            irregularity: 0.03,
            angle_noise: 3.0,
            phase: 5.0,
            clutter: 4,
            seed: 0,
        }
    }
}

/// Ring scene and the ids of its chords in ring order.
pub fn generate_ring(p: &RingParams) -> (DataSet, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let rx = rng.random_range(p.radius[0]..p.radius[1]);
    let ry = rx * rng.random_range(p.aspect[0]..p.aspect[1]);
    let tilt = rng.random_range(0.0f64..360.0).to_radians();
    let (cx, cy) = (rng.random_range(4.0..6.0), rng.random_range(4.0..6.0));
    let step = 360.0 / p.chords as f64;
    let start = step * rng.random_range(0..p.chords) as f64 + rng.random_range(-p.phase..=p.phase);
    let vertices: Vec<Point> = (0..p.chords)
        .map(|k| {
            let t = (start + step * k as f64 + rng.random_range(-p.angle_noise..=p.angle_noise)).to_radians();
            let r = 1.0 + rng.random_range(-p.irregularity..=p.irregularity);
            let (ex, ey) = (rx * r * t.cos(), ry * r * t.sin());
            let (s, c) = tilt.sin_cos();
            (cx + c * ex - s * ey, cy + s * ex + c * ey)
        })
        .collect();
    let mut items: Vec<(Segment, bool)> =
        (0..p.chords).map(|k| (Segment::between(vertices[k], vertices[(k + 1) % p.chords]), true)).collect();
    for _ in 0..p.clutter {
        items.push((
            Segment {
                x: rng.random_range(0.0..10.0),
                y: rng.random_range(0.0..10.0),
                orientation: rng.random_range(-180.0..180.0),
                length: rng.random_range(0.5..2.0),
            },
            false,
        ));
    }
    let confidences: Vec<f64> = items.iter().map(|_| sample_confidence(&mut rng, 0.1)).collect();
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.shuffle(&mut rng);
    let mut ids = vec![String::new(); p.chords];
    let mut data = Vec::new();
    for (i, &k) in order.iter().enumerate() {
        let id = format!("c{i}");
        if items[k].1 {
            ids[k] = id.clone();
        }
        data.push(Datum::new(id, Payload::Segment(items[k].0.clone()), confidences[k]));
    }
    (DataSet::new(Domain::Glyph, data).expect("ring data are valid"), ids)
}

const PALETTE: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const PX: f64 = 40.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// SVG 1.1 overlay: data in gray, each selected instance's bound segments
/// in its own color with leaf labels.
pub fn render_overlay(d: &DataSet, s: &SceneInterpretation) -> Result<String, GlyphError> {
    if d.domain() != Domain::Glyph {
        return Err(GlyphError::UnsupportedDomain(d.domain()));
    }
    for p in &s.selected {
        if let Some((_, id)) = p.result.mapping.iter().find(|(_, id)| !d.contains(id)) {
            return Err(GlyphError::DanglingBinding(id.to_string()));
        }
    }
    let segs: Vec<&Segment> = d.data().iter().filter_map(|x| x.payload.as_segment()).collect();
    let pts = segs.iter().flat_map(|s| [s.start(), s.end()]);
    let (mut x0, mut y0, mut x1, mut y1) = (0.0f64, 0.0f64, 10.0f64, 10.0f64);
    if !segs.is_empty() {
        (x0, y0, x1, y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for (x, y) in pts {
            (x0, y0, x1, y1) = (x0.min(x), y0.min(y), x1.max(x), y1.max(y));
        }
    }
    let (x0, y0, x1, y1) = (x0 - 1.0, y0 - 1.0, x1 + 1.0, y1 + 1.0);
    let (w, h) = ((x1 - x0) * PX, (y1 - y0) * PX);
    // y grows upward in the data and downward in SVG.
    let map = |p: Point| ((p.0 - x0) * PX, (y1 - p.1) * PX);
    let line = |out: &mut String, seg: &Segment, width: f64| {
        let (a, b) = (map(seg.start()), map(seg.end()));
        let _ = writeln!(
            out,
            r#"    <line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke-width="{width}"/>"#,
            a.0, a.1, b.0, b.1
        );
    };
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.2} {h:.2}">"#
    );
    out.push_str("  <g class=\"data\" stroke=\"#b0b0b0\" stroke-linecap=\"round\">\n");
    for seg in &segs {
        line(&mut out, seg, 2.0);
    }
    out.push_str("  </g>\n");
    for (k, p) in s.selected.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"  <g class="instance" id="instance-{k}" stroke="{color}" fill="{color}" stroke-linecap="round">"#
        );
        let _ = writeln!(out, "    <title>{} ({:.3})</title>", escape(&p.model), p.result.score);
        for (leaf, id) in p.result.mapping.iter() {
            let seg = d.get(id).and_then(|x| x.payload.as_segment()).expect("checked above");
            line(&mut out, seg, 4.0);
            let (c, e) = (map(seg.start()), map(seg.end()));
            let _ = writeln!(
                out,
                r#"    <text x="{:.2}" y="{:.2}" font-size="10" stroke="none">{}</text>"#,
                (c.0 + e.0) / 2.0 + 3.0,
                (c.1 + e.1) / 2.0 - 3.0,
                escape(leaf)
            );
        }
        out.push_str("  </g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{score_mapping, validate_model, DEFAULT_THETA_MISS};

    #[test]
    fn library_has_the_required_letters() {
        let reg = build_glyph_library();
        for l in ["A", "E", "F", "H", "I", "K", "L", "O", "T", "V"] {
            let m = reg.get(l).unwrap_or_else(|| panic!("missing {l}"));
            assert!(validate_model(m).is_valid());
            assert_eq!(m.depth(), 3);
        }
        assert!(reg.len() >= 10);
        assert!(reg.get("O").unwrap().leaf_ids().len() >= 6);
    }

    #[test]
    fn noise_free_letters_score_one() {
        let reg = build_glyph_library();
        for shape in letter_shapes() {
            let spec = GlyphSceneSpec {
                letters: vec![LetterPlacement { letter: shape.letter.into(), x: 2.0, y: 1.0, scale: 1.3, rotation: 25.0 }],
                extent: [10.0, 10.0],
            };
            let (d, truth) = generate_scene(&spec, &NoiseParams::default()).unwrap();
            let m = reg.get(shape.letter).unwrap();
            let s = score_mapping(m, &truth.instances[0].mapping, &d, DEFAULT_THETA_MISS).unwrap().value();
            assert!((s - 1.0).abs() < 1e-9, "{} scored {s}", shape.letter);
        }
    }

    #[test]
    fn v_is_hidden_in_overlapping_a_and_k() {
        let reg = build_glyph_library();
        let (d, truth) = generate_scene(&ak_overlap_spec(1.0, 2.0, 1.0, 0.0), &NoiseParams::default()).unwrap();
        let (a, k) = (&truth.instances[0].mapping, &truth.instances[1].mapping);
        let v = Mapping::new()
            .with("left_0", a.get("right_0").unwrap())
            .with("left_1", a.get("right_1").unwrap())
            .with("right_0", k.get("upper_0").unwrap())
            .with("right_1", k.get("upper_1").unwrap());
        let s = score_mapping(reg.get("V").unwrap(), &v, &d, DEFAULT_THETA_MISS).unwrap().value();
        assert!((s - 1.0).abs() < 1e-9);
    }

    #[test]
    fn full_dropout_leaves_only_clutter() {
        let spec = GlyphSceneSpec { letters: vec![LetterPlacement::new("E", 1.0, 1.0)], extent: [10.0, 10.0] };
        let noise = NoiseParams { dropout: 1.0, clutter: 5, ..NoiseParams::default() };
        let (d, truth) = generate_scene(&spec, &noise).unwrap();
        assert_eq!(d.len(), 5);
        assert!(truth.instances.is_empty());
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let spec = GlyphFamily::all_letters().sample(3);
        let noise = NoiseParams { jitter: 0.05, dropout: 0.2, clutter: 3, confidence_sigma: 0.3, seed: 11, ..Default::default() };
        assert_eq!(generate_scene(&spec, &noise).unwrap(), generate_scene(&spec, &noise).unwrap());
        let other = NoiseParams { seed: 12, ..noise.clone() };
        assert_ne!(generate_scene(&spec, &noise).unwrap().0, generate_scene(&spec, &other).unwrap().0);
    }

    #[test]
    fn overrides_set_confidence() {
        let spec = GlyphSceneSpec { letters: vec![LetterPlacement::new("A", 1.0, 1.0)], extent: [10.0, 10.0] };
        let mut noise = NoiseParams::default();
        noise.overrides.insert("0:bar_0".into(), 0.2);
        let (d, truth) = generate_scene(&spec, &noise).unwrap();
        let id = truth.instances[0].mapping.get("bar_0").unwrap();
        assert_eq!(d.get(id).unwrap().confidence, 0.2);
    }

    #[test]
    fn unknown_letter_is_named() {
        let spec = GlyphSceneSpec { letters: vec![LetterPlacement::new("Q", 0.0, 0.0)], extent: [10.0, 10.0] };
        let err = generate_scene(&spec, &NoiseParams::default()).unwrap_err();
        assert!(err.to_string().contains("`Q`"));
    }

    #[test]
    fn ring_has_the_requested_chords() {
        let (d, ids) = generate_ring(&RingParams { seed: 4, ..RingParams::default() });
        assert_eq!(ids.len(), 8);
        assert_eq!(d.len(), 12);
        // Consecutive chords share endpoints.
        for k in 0..8 {
            let a = d.get(&ids[k]).unwrap().payload.as_segment().unwrap().end();
            let b = d.get(&ids[(k + 1) % 8]).unwrap().payload.as_segment().unwrap().start();
            assert!((a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9);
        }
    }
}
