//! Finding good interpretations: a bottom-up beam pass followed by top-down
//! projection.
//!
//! The bottom-up pass builds candidates for every composite element from
//! admitted data (confidence at or above `leaf_threshold`), combining the
//! beams of each element's parts. Projection then takes the best complete
//! candidates and, slot by slot, asks the scorers above each weak or missing
//! slot where a fitting datum would have to lie. Any datum in that window
//! with confidence at or above `projection_threshold` is tried, and a
//! revision is kept only if the top score strictly increases.
//!
//! [`interpret`] is the single recognition entry point. It does not know or
//! care whether the data are the kind the model was built for.

mod oracle;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{DataSet, Domain, Payload};
use crate::model::{
    check_mapping, CompiledModel, Mapping, Model, PartRef, PopulateError, ValidationReport,
    DEFAULT_THETA_MISS,
};
use crate::scorers::{predict_constraint, ScorerError, Window};

pub use oracle::{
    brute_force_oracle, instance_seed, mapping_space_size, random_instance, OracleCheck, ORACLE_MAX_DATA,
    ORACLE_MAX_LEAVES,
};

/// Most top candidates handed from the bottom-up pass to projection.
pub const MAX_REFINE_STARTS: usize = 8;

/// Relation value under which a bound slot counts as weakly bound.
pub const WEAK_RELATION: f64 = 0.5;

/// Search parameters. The field list is closed: there is no switch between
/// recognizing familiar data and projecting onto unfamiliar data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BeamConfig {
    /// Candidates kept per composite element.
    pub beam_width: usize,
    /// Confidence a datum needs to enter the bottom-up pass.
    pub leaf_threshold: f64,
    /// Confidence a datum needs to be adopted under a top-down constraint.
    pub projection_threshold: f64,
    pub max_rounds: usize,
    /// Placeholder score of an unbound slot.
    pub theta_miss: f64,
    /// Recorded for provenance; the search itself is deterministic.
    pub seed: u64,
}

impl Default for BeamConfig {
    fn default() -> Self {
        BeamConfig {
            beam_width: 8,
            leaf_threshold: 0.4,
            projection_threshold: 0.1,
            max_rounds: 3,
            theta_miss: DEFAULT_THETA_MISS,
            seed: 0,
        }
    }
}

impl BeamConfig {
    /// Configuration under which the beam search is exhaustive.
    pub fn exhaustive() -> BeamConfig {
        BeamConfig {
            beam_width: usize::MAX,
            leaf_threshold: 0.0,
            projection_threshold: 0.0,
            ..BeamConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), InferenceError> {
        let ok = (0.0..=1.0).contains(&self.projection_threshold)
            && (0.0..=1.0).contains(&self.leaf_threshold)
            && self.projection_threshold <= self.leaf_threshold
            && self.beam_width >= 1
            && self.theta_miss > 0.0
            && self.theta_miss <= 1.0;
        if ok {
            Ok(())
        } else {
            Err(InferenceError::Config(format!(
                "need 0 <= projection_threshold <= leaf_threshold <= 1, beam_width >= 1, theta_miss in (0, 1]; got {self:?}"
            )))
        }
    }
}

#[derive(Debug, Error)]
pub enum InferenceError {
    #[error("invalid model: {0}")]
    InvalidModel(ValidationReport),
    #[error("model reads {model} data but the data set is {data}")]
    DomainMismatch { model: Domain, data: Domain },
    #[error("invalid search configuration: {0}")]
    Config(String),
    #[error("candidate table was built for a different model or data set")]
    TableMismatch,
    #[error("instance too large: {leaves} leaves and {data} data (limit {max_leaves} and {max_data})")]
    TooLarge { leaves: usize, data: usize, max_leaves: usize, max_data: usize },
    #[error(transparent)]
    Scorer(#[from] ScorerError),
    #[error(transparent)]
    Populate(#[from] PopulateError),
}

/// One search event, in the order it happened.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    /// A starting point for projection; opens a new refinement sequence.
    CandidateAdmitted { round: usize, rank: usize, score: f64, mapping: Mapping },
    /// Scorers above `slot` predicted a window holding `matches` usable data.
    ConstraintIssued { round: usize, slot: String, elements: Vec<String>, matches: usize },
    BindingRevised {
        round: usize,
        slot: String,
        previous: Option<String>,
        datum: String,
        score_before: f64,
        score_after: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpretationResult {
    pub mapping: Mapping,
    pub score: f64,
    pub trace: Vec<TraceEvent>,
}

impl InterpretationResult {
    /// Top-score sequence of each refinement started in the trace.
    pub fn score_sequences(&self) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        for ev in &self.trace {
            match ev {
                TraceEvent::CandidateAdmitted { score, .. } => out.push(vec![*score]),
                TraceEvent::BindingRevised { score_after, .. } => {
                    if let Some(seq) = out.last_mut() {
                        seq.push(*score_after);
                    }
                }
                TraceEvent::ConstraintIssued { .. } => {}
            }
        }
        out
    }

    /// Every refinement sequence in the trace is non-decreasing.
    pub fn is_monotone(&self) -> bool {
        self.score_sequences().iter().all(|s| s.windows(2).all(|w| w[1] >= w[0]))
    }

    pub fn revisions(&self) -> usize {
        self.trace.iter().filter(|e| matches!(e, TraceEvent::BindingRevised { .. })).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("result serializes")
    }
}

/// Whether the top-down pass runs. Used for ablation only; both share the
/// same bottom-up pass.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    #[default]
    Projection,
    #[serde(rename = "bottomup")]
    BottomUp,
}

#[derive(Clone, Debug)]
struct Entry {
    binding: Vec<Option<usize>>,
    score: f64,
}

/// One composite element's beam, best first.
#[derive(Clone, Debug)]
pub struct ElementBeam {
    pub element: String,
    pub level: usize,
    entries: Vec<Entry>,
}

impl ElementBeam {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scores(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.score).collect()
    }
}

/// A materialized candidate: a partial mapping for one element's subtree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Candidate {
    pub element: String,
    pub mapping: Mapping,
    pub score: f64,
}

/// Output of [`bottom_up_pass`]: admitted data and a sorted, deduplicated
/// beam per composite element.
#[derive(Clone, Debug)]
pub struct CandidateTable {
    model: String,
    leaves: Vec<String>,
    data_ids: Vec<String>,
    admitted: Vec<usize>,
    beams: Vec<ElementBeam>,
}

impl CandidateTable {
    fn empty(model: &Model, compiled: &CompiledModel, d: &DataSet) -> CandidateTable {
        CandidateTable {
            model: model.name.clone(),
            leaves: compiled.leaves.clone(),
            data_ids: d.data().iter().map(|x| x.id.clone()).collect(),
            admitted: Vec::new(),
            beams: Vec::new(),
        }
    }

    /// True when no datum passed the leaf threshold.
    pub fn is_empty(&self) -> bool {
        self.admitted.is_empty()
    }

    pub fn admitted(&self) -> Vec<&str> {
        self.admitted.iter().map(|&i| self.data_ids[i].as_str()).collect()
    }

    pub fn beams(&self) -> &[ElementBeam] {
        &self.beams
    }

    fn materialize(&self, beam: &ElementBeam, e: &Entry) -> Candidate {
        let mapping = e
            .binding
            .iter()
            .enumerate()
            .filter_map(|(l, d)| d.map(|d| (self.leaves[l].clone(), self.data_ids[d].clone())))
            .collect();
        Candidate { element: beam.element.clone(), mapping, score: e.score }
    }

    /// Candidates of every element at `level`, best first; level 1 lists
    /// each admitted datum once with its confidence as score.
    pub fn level(&self, level: usize) -> Vec<Candidate> {
        let mut out: Vec<Candidate> = self
            .beams
            .iter()
            .filter(|b| b.level == level)
            .flat_map(|b| b.entries.iter().map(move |e| self.materialize(b, e)))
            .collect();
        out.sort_by(|a, b| b.score.total_cmp(&a.score));
        out
    }

    pub fn beam(&self, element: &str) -> Option<Vec<Candidate>> {
        let b = self.beams.iter().find(|b| b.element == element)?;
        Some(b.entries.iter().map(|e| self.materialize(b, e)).collect())
    }

    /// Best candidate of the top element.
    pub fn best(&self) -> Option<Candidate> {
        let b = self.beams.last()?;
        b.entries.first().map(|e| self.materialize(b, e))
    }

    fn top_entries(&self) -> &[Entry] {
        self.beams.last().map(|b| b.entries.as_slice()).unwrap_or(&[])
    }
}

pub(crate) fn prepare(m: &Model, d: &DataSet, cfg: &BeamConfig) -> Result<CompiledModel, InferenceError> {
    cfg.validate()?;
    let compiled = CompiledModel::new(m).map_err(InferenceError::InvalidModel)?;
    if let Some(md) = m.domain() {
        if md != d.domain() {
            return Err(InferenceError::DomainMismatch { model: md, data: d.domain() });
        }
    }
    Ok(compiled)
}

fn cmp_entries(a: &Entry, b: &Entry) -> std::cmp::Ordering {
    b.score.total_cmp(&a.score).then_with(|| a.binding.cmp(&b.binding))
}

/// Feed-forward candidate construction, level by level, without any
/// higher-level guidance.
pub fn bottom_up_pass(m: &Model, d: &DataSet, cfg: &BeamConfig) -> Result<CandidateTable, InferenceError> {
    let compiled = prepare(m, d, cfg)?;
    bottom_up_compiled(m, &compiled, d, cfg)
}

fn bottom_up_compiled(
    m: &Model,
    c: &CompiledModel,
    d: &DataSet,
    cfg: &BeamConfig,
) -> Result<CandidateTable, InferenceError> {
    let mut table = CandidateTable::empty(m, c, d);
    table.admitted = d
        .data()
        .iter()
        .enumerate()
        .filter(|(_, x)| x.confidence >= cfg.leaf_threshold)
        .map(|(i, _)| i)
        .collect();
    if table.admitted.is_empty() {
        return Ok(table);
    }
    let theta = cfg.theta_miss;
    let n_leaves = c.leaves.len();
    let none = vec![None; n_leaves];
    let mut floors = vec![0.0; c.elements.len()];
    for i in 0..c.elements.len() {
        c.score_element(i, &none, d, theta, &mut floors)?;
    }

    // Each option is the list of (leaf, value) it fixes plus its score.
    type Opt = (Vec<(usize, Option<usize>)>, f64);
    let mut beams: Vec<Vec<Entry>> = Vec::with_capacity(c.elements.len());
    for e in &c.elements {
        let options: Vec<Vec<Opt>> = e
            .parts
            .iter()
            .map(|p| match p {
                PartRef::Leaf(l) => {
                    let mut v: Vec<Opt> = table
                        .admitted
                        .iter()
                        .map(|&di| (vec![(*l, Some(di))], d.data()[di].confidence))
                        .collect();
                    v.push((vec![(*l, None)], theta));
                    v
                }
                PartRef::Elem(ch) => {
                    let leaves = &c.elements[*ch].leaves;
                    let mut v: Vec<Opt> = beams[*ch]
                        .iter()
                        .map(|en| (leaves.iter().map(|&l| (l, en.binding[l])).collect(), en.score))
                        .collect();
                    v.push((leaves.iter().map(|&l| (l, None)).collect(), floors[*ch]));
                    v
                }
            })
            .collect();

        let mut seen: HashSet<Vec<Option<usize>>> = HashSet::new();
        let mut entries: Vec<Entry> = Vec::new();
        let mut idx = vec![0usize; options.len()];
        let mut binding = vec![None; n_leaves];
        let mut set = vec![false; n_leaves];
        'combos: loop {
            for &l in &e.leaves {
                set[l] = false;
                binding[l] = None;
            }
            let mut consistent = true;
            let mut log_sum = 0.0;
            let mut zero = false;
            for (pi, &oi) in idx.iter().enumerate() {
                let (fixes, s) = &options[pi][oi];
                for &(l, v) in fixes {
                    if set[l] {
                        if binding[l] != v {
                            consistent = false;
                        }
                    } else {
                        set[l] = true;
                        binding[l] = v;
                    }
                }
                if *s <= 0.0 {
                    zero = true;
                } else {
                    log_sum += s.ln();
                }
            }
            if consistent && !seen.contains(&binding) {
                let rel = e.scorer.value(&binding, d, theta)?;
                let score = if zero || rel <= 0.0 {
                    0.0
                } else {
                    rel * (log_sum / e.parts.len() as f64).exp()
                };
                seen.insert(binding.clone());
                entries.push(Entry { binding: binding.clone(), score });
            }
            // Odometer over part options.
            let mut k = 0;
            loop {
                if k == idx.len() {
                    break 'combos;
                }
                idx[k] += 1;
                if idx[k] < options[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
        entries.sort_by(cmp_entries);
        entries.truncate(cfg.beam_width);
        beams.push(entries);
    }
    table.beams = c
        .elements
        .iter()
        .zip(beams)
        .map(|(e, entries)| ElementBeam { element: e.id.clone(), level: e.level, entries })
        .collect();
    Ok(table)
}

/// Top-down revision of the best bottom-up candidates.
pub fn project_refine(
    m: &Model,
    d: &DataSet,
    table: &CandidateTable,
    cfg: &BeamConfig,
) -> Result<InterpretationResult, InferenceError> {
    let compiled = prepare(m, d, cfg)?;
    check_table(&compiled, m, d, table)?;
    refine_compiled(&compiled, d, table, cfg, &[])
}

fn check_table(c: &CompiledModel, m: &Model, d: &DataSet, t: &CandidateTable) -> Result<(), InferenceError> {
    let same_data = t.data_ids.len() == d.len() && t.data_ids.iter().zip(d.data()).all(|(a, b)| *a == b.id);
    if t.model != m.name || t.leaves != c.leaves || !same_data {
        return Err(InferenceError::TableMismatch);
    }
    Ok(())
}

struct Refiner<'a> {
    c: &'a CompiledModel,
    d: &'a DataSet,
    cfg: &'a BeamConfig,
    frozen: &'a [bool],
    /// Composite elements whose scorer reads each leaf.
    readers: Vec<Vec<usize>>,
    trace: Vec<TraceEvent>,
    cache: Vec<f64>,
}

impl<'a> Refiner<'a> {
    fn score(&mut self, binding: &[Option<usize>]) -> Result<f64, InferenceError> {
        let top = self.c.top();
        Ok(self.c.score_element(top, binding, self.d, self.cfg.theta_miss, &mut self.cache)?)
    }

    /// Weak or missing slots, most limiting first.
    fn prioritized(&self, binding: &[Option<usize>]) -> Result<Vec<usize>, InferenceError> {
        let rel: Vec<f64> = self
            .c
            .elements
            .iter()
            .map(|e| e.scorer.value(binding, self.d, self.cfg.theta_miss))
            .collect::<Result<_, _>>()?;
        let mut keyed: Vec<(bool, f64, usize, usize)> = Vec::new();
        for (l, b) in binding.iter().enumerate() {
            if self.frozen.get(l).copied().unwrap_or(false) {
                continue;
            }
            let (min_rel, at) = self.readers[l]
                .iter()
                .map(|&e| (rel[e], e))
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                .unwrap_or((1.0, usize::MAX));
            let weak = match b {
                None => true,
                Some(di) => self.d.data()[*di].confidence < self.cfg.leaf_threshold || min_rel < WEAK_RELATION,
            };
            if weak {
                keyed.push((b.is_some(), min_rel, at, l));
            }
        }
        keyed.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)).then(a.3.cmp(&b.3)));
        Ok(keyed.into_iter().map(|k| k.3).collect())
    }

    /// Windows predicted for `slot` by every scorer that reads it.
    fn windows(&self, binding: &[Option<usize>], slot: usize) -> Result<(Vec<Window>, Vec<String>), InferenceError> {
        let mut windows = Vec::new();
        let mut names = Vec::new();
        for &ei in &self.readers[slot] {
            let e = &self.c.elements[ei];
            let bound: Vec<Option<&Payload>> = e
                .arg_leaves
                .iter()
                .map(|&l| if l == slot { None } else { binding[l].map(|di| &self.d.data()[di].payload) })
                .collect();
            let pos = e.arg_leaves.iter().position(|&l| l == slot).expect("reader reads slot");
            match predict_constraint(&e.spec, &bound, pos) {
                Ok(cons) => {
                    if !cons.window.is_empty() {
                        windows.push(cons.window);
                        names.push(e.id.clone());
                    }
                }
                Err(ScorerError::NotInvertible { .. } | ScorerError::NoBoundParts(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
        Ok((windows, names))
    }

    fn refine(&mut self, start: Vec<Option<usize>>, rank: usize) -> Result<(Vec<Option<usize>>, f64), InferenceError> {
        let mut binding = start;
        let mut score = self.score(&binding)?;
        self.trace.push(TraceEvent::CandidateAdmitted {
            round: 0,
            rank,
            score,
            mapping: self.c.mapping_of(&binding, self.d),
        });
        for round in 1..=self.cfg.max_rounds {
            let mut improved = false;
            for slot in self.prioritized(&binding)? {
                let (windows, elements) = self.windows(&binding, slot)?;
                if windows.is_empty() {
                    continue;
                }
                let matches: Vec<usize> = self
                    .d
                    .data()
                    .iter()
                    .enumerate()
                    .filter(|(di, x)| {
                        Some(*di) != binding[slot]
                            && x.confidence >= self.cfg.projection_threshold
                            && windows.iter().any(|w| w.contains(&x.payload))
                    })
                    .map(|(di, _)| di)
                    .collect();
                self.trace.push(TraceEvent::ConstraintIssued {
                    round,
                    slot: self.c.leaves[slot].clone(),
                    elements,
                    matches: matches.len(),
                });
                let previous = binding[slot];
                let mut best: Option<(usize, f64)> = None;
                for di in matches {
                    binding[slot] = Some(di);
                    let s = self.score(&binding)?;
                    if best.is_none_or(|(_, b)| s > b) {
                        best = Some((di, s));
                    }
                }
                binding[slot] = previous;
                if let Some((di, s)) = best {
                    if s > score {
                        binding[slot] = Some(di);
                        self.trace.push(TraceEvent::BindingRevised {
                            round,
                            slot: self.c.leaves[slot].clone(),
                            previous: previous.map(|p| self.d.data()[p].id.clone()),
                            datum: self.d.data()[di].id.clone(),
                            score_before: score,
                            score_after: s,
                        });
                        score = s;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        Ok((binding, score))
    }
}

pub(crate) fn refine_compiled(
    c: &CompiledModel,
    d: &DataSet,
    table: &CandidateTable,
    cfg: &BeamConfig,
    frozen: &[bool],
) -> Result<InterpretationResult, InferenceError> {
    let mut readers = vec![Vec::new(); c.leaves.len()];
    for (ei, e) in c.elements.iter().enumerate() {
        for &l in &e.arg_leaves {
            if !readers[l].contains(&ei) {
                readers[l].push(ei);
            }
        }
    }
    let mut r = Refiner { c, d, cfg, frozen, readers, trace: Vec::new(), cache: vec![0.0; c.elements.len()] };
    let starts: Vec<Vec<Option<usize>>> = if table.top_entries().is_empty() {
        vec![vec![None; c.leaves.len()]]
    } else {
        table
            .top_entries()
            .iter()
            .take(cfg.beam_width.min(MAX_REFINE_STARTS))
            .map(|e| e.binding.clone())
            .collect()
    };
    let mut best: Option<(Vec<Option<usize>>, f64)> = None;
    for (rank, start) in starts.into_iter().enumerate() {
        // Scores never exceed 1, so no later start can strictly beat a perfect one.
        if best.as_ref().is_some_and(|(_, bs)| *bs >= 1.0) {
            break;
        }
        let (b, s) = r.refine(start, rank)?;
        if best.as_ref().is_none_or(|(_, bs)| s > *bs) {
            best = Some((b, s));
        }
    }
    let (binding, score) = best.expect("at least one start");
    Ok(InterpretationResult { mapping: c.mapping_of(&binding, d), score, trace: r.trace })
}

fn bottom_up_result(c: &CompiledModel, d: &DataSet, table: &CandidateTable, cfg: &BeamConfig) -> Result<InterpretationResult, InferenceError> {
    let binding = table.top_entries().first().map(|e| e.binding.clone()).unwrap_or_else(|| vec![None; c.leaves.len()]);
    let score = c.score(&binding, d, cfg.theta_miss)?;
    let mapping = c.mapping_of(&binding, d);
    let trace = vec![TraceEvent::CandidateAdmitted { round: 0, rank: 0, score, mapping: mapping.clone() }];
    Ok(InterpretationResult { mapping, score, trace })
}

/// Best interpretation of `d` under `m`: bottom-up pass, then projection.
pub fn interpret(m: &Model, d: &DataSet, cfg: &BeamConfig) -> Result<InterpretationResult, InferenceError> {
    recognize(m, d, cfg, Strategy::Projection)
}

/// [`interpret`], or with `Strategy::BottomUp` the best bottom-up candidate
/// as is.
pub fn recognize(
    m: &Model,
    d: &DataSet,
    cfg: &BeamConfig,
    strategy: Strategy,
) -> Result<InterpretationResult, InferenceError> {
    let c = prepare(m, d, cfg)?;
    let table = bottom_up_compiled(m, &c, d, cfg)?;
    match strategy {
        Strategy::Projection => refine_compiled(&c, d, &table, cfg, &[]),
        Strategy::BottomUp => bottom_up_result(&c, d, &table, cfg),
    }
}

/// [`interpret`] with the slots in `anchors` pinned. The returned mapping
/// extends `anchors` exactly.
pub fn interpret_anchored(
    m: &Model,
    d: &DataSet,
    anchors: &Mapping,
    cfg: &BeamConfig,
) -> Result<InterpretationResult, InferenceError> {
    let c = prepare(m, d, cfg)?;
    check_mapping(m, anchors, d)?;
    let pinned = c.binding_of(anchors, d);
    let frozen: Vec<bool> = pinned.iter().map(Option::is_some).collect();
    if frozen.iter().all(|f| *f) {
        let score = c.score(&pinned, d, cfg.theta_miss)?;
        return Ok(InterpretationResult { mapping: anchors.clone(), score, trace: Vec::new() });
    }
    // Projection starts from top candidates overridden by the anchors.
    let mut table = bottom_up_compiled(m, &c, d, cfg)?;
    let top_beam = ElementBeam {
        element: c.elements[c.top()].id.clone(),
        level: c.elements[c.top()].level,
        entries: Vec::new(),
    };
    if table.beams.is_empty() {
        table.beams = vec![top_beam];
    }
    let top = table.beams.last_mut().expect("top beam");
    for e in &mut top.entries {
        for (l, p) in pinned.iter().enumerate() {
            if p.is_some() {
                e.binding[l] = *p;
            }
        }
        e.score = c.score(&e.binding, d, cfg.theta_miss)?;
    }
    top.entries.sort_by(cmp_entries);
    top.entries.dedup_by(|a, b| a.binding == b.binding);
    if top.entries.is_empty() {
        let score = c.score(&pinned, d, cfg.theta_miss)?;
        top.entries.push(Entry { binding: pinned.clone(), score });
    }
    refine_compiled(&c, d, &table, cfg, &frozen)
}

#[cfg(test)]
mod tests;
