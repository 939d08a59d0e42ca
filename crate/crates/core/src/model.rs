//! Hierarchical compositional models and the hierarchical score of an
//! interpretation.
//!
//! A model is a stack of levels. Level 1 holds empty slots that get bound to
//! data; every element above it names parts in the level directly below and
//! carries a relation scorer. The single element of the top level yields the
//! score of a whole interpretation.
//!
//! Scoring is bottom-up. A bound slot scores its datum's confidence, an
//! unbound slot scores `theta_miss`. A composite element scores
//! `relation term x geometric mean of its parts' scores`, where a relation
//! with `m` of its `k` arguments unbound contributes `theta_miss^(m/k)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{DataSet, Domain, Payload};
use crate::scorers::{eval_relation, Score, ScorerError, ScorerSpec};

/// Default placeholder score for an unbound slot.
pub const DEFAULT_THETA_MISS: f64 = 0.3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Model {
    pub name: String,
    pub levels: Vec<Level>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Level {
    pub index: usize,
    pub elements: Vec<Element>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Element {
    pub id: String,
    #[serde(default)]
    pub parts: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scorer: Option<ScorerSpec>,
}

impl Element {
    pub fn slot(id: impl Into<String>) -> Element {
        Element { id: id.into(), parts: Vec::new(), scorer: None }
    }

    pub fn composite(id: impl Into<String>, parts: &[&str], scorer: ScorerSpec) -> Element {
        Element {
            id: id.into(),
            parts: parts.iter().map(|p| p.to_string()).collect(),
            scorer: Some(scorer),
        }
    }
}

/// One broken invariant, naming the elements involved.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    TooFewLevels { found: usize },
    LevelIndex { position: usize, found: usize },
    EmptyLevel { index: usize },
    TopLevelArity { count: usize },
    DuplicateId { id: String },
    LeafHasParts { element: String },
    LeafHasScorer { element: String },
    MissingParts { element: String },
    MissingScorer { element: String },
    UnknownPart { element: String, part: String },
    DuplicatePart { element: String, part: String },
    NonAdjacentPart { element: String, part: String, expected_level: usize, found_level: usize },
    Cycle { members: Vec<String> },
    Unreachable { element: String },
    ScorerArg { element: String, arg: String },
    ScorerParams { element: String, message: String },
    MixedDomain { element: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewLevels { found } => write!(f, "model needs >= 2 levels, found {found}"),
            Violation::LevelIndex { position, found } => {
                write!(f, "level at position {position} has index {found}")
            }
            Violation::EmptyLevel { index } => write!(f, "level {index} has no elements"),
            Violation::TopLevelArity { count } => {
                write!(f, "top level must have exactly one element, found {count}")
            }
            Violation::DuplicateId { id } => write!(f, "element id `{id}` is not unique"),
            Violation::LeafHasParts { element } => write!(f, "leaf `{element}` has parts"),
            Violation::LeafHasScorer { element } => write!(f, "leaf `{element}` has a scorer"),
            Violation::MissingParts { element } => write!(f, "`{element}` has no parts"),
            Violation::MissingScorer { element } => write!(f, "`{element}` has no scorer"),
            Violation::UnknownPart { element, part } => {
                write!(f, "`{element}` references unknown part `{part}`")
            }
            Violation::DuplicatePart { element, part } => {
                write!(f, "`{element}` lists part `{part}` twice")
            }
            Violation::NonAdjacentPart { element, part, expected_level, found_level } => write!(
                f,
                "`{element}` references `{part}` at level {found_level}, expected level {expected_level}"
            ),
            Violation::Cycle { members } => write!(f, "part references form a cycle: {}", members.join(" -> ")),
            Violation::Unreachable { element } => {
                write!(f, "`{element}` is not reachable from the top element")
            }
            Violation::ScorerArg { element, arg } => {
                write!(f, "scorer of `{element}` reads `{arg}`, which is not a leaf below it")
            }
            Violation::ScorerParams { element, message } => write!(f, "scorer of `{element}`: {message}"),
            Violation::MixedDomain { element } => {
                write!(f, "scorer of `{element}` reads a different domain than the rest of the model")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&lines.join("; "))
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed model document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid model: {0}")]
    Invalid(ValidationReport),
}

/// Parse and validate a model document.
pub fn load_model(source: &str) -> Result<Model, ModelError> {
    let model: Model = serde_json::from_str(source)?;
    let report = validate_model(&model);
    if report.is_valid() {
        Ok(model)
    } else {
        Err(ModelError::Invalid(report))
    }
}

impl Model {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    /// Domain read by the model's scorers, if consistent.
    pub fn domain(&self) -> Option<Domain> {
        self.levels
            .iter()
            .flat_map(|l| &l.elements)
            .filter_map(|e| e.scorer.as_ref())
            .find_map(|s| s.domain())
    }

    pub fn leaf_ids(&self) -> Vec<&str> {
        self.levels
            .first()
            .map(|l| l.elements.iter().map(|e| e.id.as_str()).collect())
            .unwrap_or_default()
    }

    pub fn element(&self, id: &str) -> Option<&Element> {
        self.levels.iter().flat_map(|l| &l.elements).find(|e| e.id == id)
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }
}

/// Check every model invariant; an empty report means the model is valid.
pub fn validate_model(m: &Model) -> ValidationReport {
    let mut v = Vec::new();
    if m.levels.len() < 2 {
        v.push(Violation::TooFewLevels { found: m.levels.len() });
    }
    let mut level_of: HashMap<&str, usize> = HashMap::new();
    for (pos, level) in m.levels.iter().enumerate() {
        if level.index != pos + 1 {
            v.push(Violation::LevelIndex { position: pos + 1, found: level.index });
        }
        if level.elements.is_empty() {
            v.push(Violation::EmptyLevel { index: pos + 1 });
        }
        for e in &level.elements {
            if level_of.insert(e.id.as_str(), pos + 1).is_some() {
                v.push(Violation::DuplicateId { id: e.id.clone() });
            }
        }
    }
    if let Some(top) = m.levels.last() {
        if m.levels.len() >= 2 && top.elements.len() != 1 {
            v.push(Violation::TopLevelArity { count: top.elements.len() });
        }
    }

    let by_id: HashMap<&str, &Element> =
        m.levels.iter().flat_map(|l| &l.elements).map(|e| (e.id.as_str(), e)).collect();

    let mut domain: Option<Domain> = None;
    for (pos, level) in m.levels.iter().enumerate() {
        let lvl = pos + 1;
        for e in &level.elements {
            if lvl == 1 {
                if !e.parts.is_empty() {
                    v.push(Violation::LeafHasParts { element: e.id.clone() });
                }
                if e.scorer.is_some() {
                    v.push(Violation::LeafHasScorer { element: e.id.clone() });
                }
                continue;
            }
            if e.parts.is_empty() {
                v.push(Violation::MissingParts { element: e.id.clone() });
            }
            let mut seen = BTreeSet::new();
            for part in &e.parts {
                if !seen.insert(part) {
                    v.push(Violation::DuplicatePart { element: e.id.clone(), part: part.clone() });
                }
                match level_of.get(part.as_str()) {
                    None => v.push(Violation::UnknownPart { element: e.id.clone(), part: part.clone() }),
                    Some(&pl) if pl + 1 != lvl => v.push(Violation::NonAdjacentPart {
                        element: e.id.clone(),
                        part: part.clone(),
                        expected_level: lvl - 1,
                        found_level: pl,
                    }),
                    Some(_) => {}
                }
            }
            match &e.scorer {
                None => v.push(Violation::MissingScorer { element: e.id.clone() }),
                Some(spec) => {
                    for message in spec.problems() {
                        v.push(Violation::ScorerParams { element: e.id.clone(), message });
                    }
                    match (spec.domain(), domain) {
                        (Some(d), None) => domain = Some(d),
                        (Some(d), Some(prev)) if d != prev => {
                            v.push(Violation::MixedDomain { element: e.id.clone() })
                        }
                        _ => {}
                    }
                }
            }
        }
    }

    // Cycles, over every known reference regardless of level.
    let mut state: HashMap<&str, u8> = HashMap::new();
    let mut reported: BTreeSet<Vec<String>> = BTreeSet::new();
    for level in &m.levels {
        for e in &level.elements {
            let mut stack = Vec::new();
            find_cycles(e.id.as_str(), &by_id, &mut state, &mut stack, &mut reported);
        }
    }
    for members in reported {
        v.push(Violation::Cycle { members });
    }

    // Reachability and scorer arguments need an acyclic graph to be meaningful.
    let acyclic = !v.iter().any(|x| matches!(x, Violation::Cycle { .. }));
    if acyclic {
        if let Some(top) = m.levels.last().filter(|l| l.elements.len() == 1) {
            let reach = descendants(top.elements[0].id.as_str(), &by_id);
            for level in &m.levels {
                for e in &level.elements {
                    if e.id != top.elements[0].id && !reach.contains(e.id.as_str()) {
                        v.push(Violation::Unreachable { element: e.id.clone() });
                    }
                }
            }
        }
        for (pos, level) in m.levels.iter().enumerate().skip(1) {
            let _ = pos;
            for e in &level.elements {
                let Some(spec) = &e.scorer else { continue };
                let below = descendants(e.id.as_str(), &by_id);
                for arg in spec.args() {
                    let is_leaf = level_of.get(arg) == Some(&1);
                    if !is_leaf || !below.contains(arg) {
                        v.push(Violation::ScorerArg { element: e.id.clone(), arg: arg.to_string() });
                    }
                }
            }
        }
    }
    ValidationReport { violations: v }
}

fn find_cycles<'a>(
    id: &'a str,
    by_id: &HashMap<&'a str, &'a Element>,
    state: &mut HashMap<&'a str, u8>,
    stack: &mut Vec<&'a str>,
    reported: &mut BTreeSet<Vec<String>>,
) {
    match state.get(id) {
        Some(2) => return,
        Some(1) => {
            let start = stack.iter().position(|s| *s == id).unwrap_or(0);
            let mut members: Vec<String> = stack[start..].iter().map(|s| s.to_string()).collect();
            // Canonical rotation so a cycle is reported once.
            let min = members.iter().enumerate().min_by_key(|(_, s)| s.as_str()).map(|(i, _)| i).unwrap_or(0);
            members.rotate_left(min);
            members.push(members[0].clone());
            reported.insert(members);
            return;
        }
        _ => {}
    }
    state.insert(id, 1);
    stack.push(id);
    if let Some(e) = by_id.get(id) {
        for p in &e.parts {
            if let Some((k, _)) = by_id.get_key_value(p.as_str()) {
                find_cycles(k, by_id, state, stack, reported);
            }
        }
    }
    stack.pop();
    state.insert(id, 2);
}

fn descendants<'a>(id: &'a str, by_id: &HashMap<&'a str, &'a Element>) -> BTreeSet<&'a str> {
    let mut out = BTreeSet::new();
    let mut todo = vec![id];
    while let Some(cur) = todo.pop() {
        if let Some(e) = by_id.get(cur) {
            for p in &e.parts {
                if let Some((k, _)) = by_id.get_key_value(p.as_str()) {
                    if out.insert(*k) {
                        todo.push(k);
                    }
                }
            }
        }
    }
    out
}

/// Partial assignment of leaf slots to datum ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mapping {
    bindings: BTreeMap<String, String>,
}

impl Mapping {
    pub fn new() -> Mapping {
        Mapping::default()
    }

    pub fn bind(&mut self, leaf: impl Into<String>, datum: impl Into<String>) -> &mut Self {
        self.bindings.insert(leaf.into(), datum.into());
        self
    }

    pub fn with(mut self, leaf: impl Into<String>, datum: impl Into<String>) -> Self {
        self.bind(leaf, datum);
        self
    }

    pub fn unbind(&mut self, leaf: &str) -> Option<String> {
        self.bindings.remove(leaf)
    }

    pub fn get(&self, leaf: &str) -> Option<&str> {
        self.bindings.get(leaf).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Distinct datum ids used by this mapping.
    pub fn datum_ids(&self) -> BTreeSet<&str> {
        self.bindings.values().map(String::as_str).collect()
    }

    /// True when every binding of `other` is also in `self`.
    pub fn extends(&self, other: &Mapping) -> bool {
        other.iter().all(|(l, d)| self.get(l) == Some(d))
    }
}

impl FromIterator<(String, String)> for Mapping {
    fn from_iter<T: IntoIterator<Item = (String, String)>>(iter: T) -> Self {
        Mapping { bindings: iter.into_iter().collect() }
    }
}

// ---------------------------------------------------------------------------
// Index-based form used by scoring and search.

#[derive(Clone, Debug)]
pub(crate) enum PartRef {
    Leaf(usize),
    Elem(usize),
}

#[derive(Clone, Debug)]
pub(crate) enum CompiledScorer {
    Relation { spec: ScorerSpec, args: Vec<usize> },
    Conjunction { children: Vec<CompiledScorer>, weights: Vec<f64> },
}

impl CompiledScorer {
    fn build(spec: &ScorerSpec, leaf_index: &HashMap<String, usize>) -> CompiledScorer {
        match spec {
            ScorerSpec::Conjunction { children, weights } => CompiledScorer::Conjunction {
                children: children.iter().map(|c| CompiledScorer::build(c, leaf_index)).collect(),
                weights: weights.clone(),
            },
            other => CompiledScorer::Relation {
                spec: other.clone(),
                args: other.args().iter().map(|a| leaf_index[*a]).collect(),
            },
        }
    }

    /// Relation term with missing arguments penalized by `theta^(m/k)`.
    pub(crate) fn value(
        &self,
        binding: &[Option<usize>],
        data: &DataSet,
        theta: f64,
    ) -> Result<f64, ScorerError> {
        match self {
            CompiledScorer::Relation { spec, args } => {
                let mut parts: Vec<&Payload> = Vec::with_capacity(args.len());
                let mut missing = 0usize;
                for &leaf in args {
                    match binding[leaf] {
                        Some(d) => parts.push(&data.data()[d].payload),
                        None => missing += 1,
                    }
                }
                if missing == 0 {
                    Ok(eval_relation(spec, &parts)?.value())
                } else {
                    Ok(theta.powf(missing as f64 / args.len() as f64))
                }
            }
            CompiledScorer::Conjunction { children, weights } => {
                let mut log_sum = 0.0;
                for (c, w) in children.iter().zip(weights) {
                    let v = c.value(binding, data, theta)?;
                    if v <= 0.0 {
                        return Ok(0.0);
                    }
                    log_sum += w * v.ln();
                }
                Ok(log_sum.exp())
            }
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct CompiledElement {
    pub id: String,
    pub level: usize,
    pub parts: Vec<PartRef>,
    pub spec: ScorerSpec,
    pub scorer: CompiledScorer,
    /// `spec.args()` resolved to leaf indices.
    pub arg_leaves: Vec<usize>,
    /// Sorted leaf indices under this element.
    pub leaves: Vec<usize>,
    /// Composite elements under (and including) this one, bottom-up.
    pub subtree: Vec<usize>,
}

/// A validated model in index form. Composite elements are stored
/// bottom-up, so the top element is last.
#[derive(Clone, Debug)]
pub(crate) struct CompiledModel {
    pub leaves: Vec<String>,
    pub leaf_index: HashMap<String, usize>,
    pub elements: Vec<CompiledElement>,
}

impl CompiledModel {
    pub fn new(m: &Model) -> Result<CompiledModel, ValidationReport> {
        let report = validate_model(m);
        if !report.is_valid() {
            return Err(report);
        }
        let leaves: Vec<String> = m.levels[0].elements.iter().map(|e| e.id.clone()).collect();
        let leaf_index: HashMap<String, usize> =
            leaves.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        let mut elem_index: HashMap<String, usize> = HashMap::new();
        let mut elements: Vec<CompiledElement> = Vec::new();
        for level in &m.levels[1..] {
            for e in &level.elements {
                let spec = e.scorer.clone().expect("validated");
                let parts: Vec<PartRef> = e
                    .parts
                    .iter()
                    .map(|p| match leaf_index.get(p) {
                        Some(&l) => PartRef::Leaf(l),
                        None => PartRef::Elem(elem_index[p]),
                    })
                    .collect();
                let mut leaf_set = BTreeSet::new();
                let mut sub = BTreeSet::new();
                for p in &parts {
                    match p {
                        PartRef::Leaf(l) => {
                            leaf_set.insert(*l);
                        }
                        PartRef::Elem(c) => {
                            leaf_set.extend(elements[*c].leaves.iter().copied());
                            sub.extend(elements[*c].subtree.iter().copied());
                        }
                    }
                }
                let idx = elements.len();
                sub.insert(idx);
                let arg_leaves = spec.args().iter().map(|a| leaf_index[*a]).collect();
                elements.push(CompiledElement {
                    id: e.id.clone(),
                    level: level.index,
                    parts,
                    scorer: CompiledScorer::build(&spec, &leaf_index),
                    spec,
                    arg_leaves,
                    leaves: leaf_set.into_iter().collect(),
                    // Indices increase bottom-up, so sorted order is evaluation order.
                    subtree: sub.into_iter().collect(),
                });
                elem_index.insert(e.id.clone(), idx);
            }
        }
        Ok(CompiledModel { leaves, leaf_index, elements })
    }

    pub fn top(&self) -> usize {
        self.elements.len() - 1
    }

    /// Score of element `elem` under `binding`; fills `cache` for the subtree.
    pub fn score_element(
        &self,
        elem: usize,
        binding: &[Option<usize>],
        data: &DataSet,
        theta: f64,
        cache: &mut [f64],
    ) -> Result<f64, ScorerError> {
        for &i in &self.elements[elem].subtree {
            let e = &self.elements[i];
            let rel = e.scorer.value(binding, data, theta)?;
            let mut log_sum = 0.0;
            let mut zero = rel <= 0.0;
            for p in &e.parts {
                let s = match p {
                    PartRef::Leaf(l) => binding[*l].map_or(theta, |d| data.data()[d].confidence),
                    PartRef::Elem(c) => cache[*c],
                };
                if s <= 0.0 {
                    zero = true;
                    break;
                }
                log_sum += s.ln();
            }
            cache[i] = if zero { 0.0 } else { rel * (log_sum / e.parts.len() as f64).exp() };
        }
        Ok(cache[elem])
    }

    pub fn score(&self, binding: &[Option<usize>], data: &DataSet, theta: f64) -> Result<f64, ScorerError> {
        let mut cache = vec![0.0; self.elements.len()];
        self.score_element(self.top(), binding, data, theta, &mut cache)
    }

    /// Index binding from a mapping; ids must already be checked.
    pub fn binding_of(&self, map: &Mapping, data: &DataSet) -> Vec<Option<usize>> {
        let mut b = vec![None; self.leaves.len()];
        for (leaf, datum) in map.iter() {
            if let (Some(&l), Some(d)) = (self.leaf_index.get(leaf), data.position(datum)) {
                b[l] = Some(d);
            }
        }
        b
    }

    pub fn mapping_of(&self, binding: &[Option<usize>], data: &DataSet) -> Mapping {
        binding
            .iter()
            .enumerate()
            .filter_map(|(l, d)| d.map(|d| (self.leaves[l].clone(), data.data()[d].id.clone())))
            .collect()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PopulateError {
    #[error("invalid model: {0}")]
    InvalidModel(ValidationReport),
    #[error("mapping binds unknown leaf `{0}`")]
    UnknownLeaf(String),
    #[error("mapping references unknown datum `{0}`")]
    UnknownDatum(String),
}

/// Check a mapping against a model's leaves and a data set.
pub fn check_mapping(m: &Model, map: &Mapping, d: &DataSet) -> Result<(), PopulateError> {
    let leaves: BTreeSet<&str> = m.leaf_ids().into_iter().collect();
    for (leaf, datum) in map.iter() {
        if !leaves.contains(leaf) {
            return Err(PopulateError::UnknownLeaf(leaf.to_string()));
        }
        if !d.contains(datum) {
            return Err(PopulateError::UnknownDatum(datum.to_string()));
        }
    }
    Ok(())
}

/// A model with its leaf slots bound to data and, after scoring, a score
/// per element.
#[derive(Clone, Debug)]
pub struct InstantiatedModel<'a> {
    model: &'a Model,
    data: &'a DataSet,
    mapping: Mapping,
    theta_miss: f64,
    compiled: CompiledModel,
    binding: Vec<Option<usize>>,
    cache: BTreeMap<String, f64>,
}

impl<'a> InstantiatedModel<'a> {
    pub fn with_theta_miss(mut self, theta_miss: f64) -> Self {
        self.theta_miss = theta_miss;
        self.cache.clear();
        self
    }

    pub fn model(&self) -> &Model {
        self.model
    }

    pub fn mapping(&self) -> &Mapping {
        &self.mapping
    }

    /// Datum bound to `leaf`, or `None` when the slot is missing.
    pub fn slot(&self, leaf: &str) -> Option<&crate::data::Datum> {
        let l = *self.compiled.leaf_index.get(leaf)?;
        self.binding[l].map(|d| &self.data.data()[d])
    }

    pub fn missing_leaves(&self) -> Vec<&str> {
        self.compiled
            .leaves
            .iter()
            .zip(&self.binding)
            .filter(|(_, b)| b.is_none())
            .map(|(l, _)| l.as_str())
            .collect()
    }

    /// Per-element scores; empty until `score_tree` has run.
    pub fn cache(&self) -> &BTreeMap<String, f64> {
        &self.cache
    }
}

/// Bind the leaf slots of `m` as `map` says. No scores are computed.
pub fn populate<'a>(m: &'a Model, map: &Mapping, d: &'a DataSet) -> Result<InstantiatedModel<'a>, PopulateError> {
    let compiled = CompiledModel::new(m).map_err(PopulateError::InvalidModel)?;
    check_mapping(m, map, d)?;
    let binding = compiled.binding_of(map, d);
    Ok(InstantiatedModel {
        model: m,
        data: d,
        mapping: map.clone(),
        theta_miss: DEFAULT_THETA_MISS,
        compiled,
        binding,
        cache: BTreeMap::new(),
    })
}

/// Bottom-up hierarchical score of a populated model; fills the cache with
/// every leaf and element score.
pub fn score_tree(inst: &mut InstantiatedModel<'_>) -> Result<Score, ScorerError> {
    let c = &inst.compiled;
    let mut scores = vec![0.0; c.elements.len()];
    let top = c.score_element(c.top(), &inst.binding, inst.data, inst.theta_miss, &mut scores)?;
    inst.cache.clear();
    for (l, b) in c.leaves.iter().zip(&inst.binding) {
        inst.cache.insert(l.clone(), b.map_or(inst.theta_miss, |d| inst.data.data()[d].confidence));
    }
    for (e, s) in c.elements.iter().zip(scores) {
        inst.cache.insert(e.id.clone(), s);
    }
    Ok(Score::new(top))
}

#[derive(Debug, Error)]
pub enum ScoreMappingError {
    #[error(transparent)]
    Populate(#[from] PopulateError),
    #[error(transparent)]
    Scorer(#[from] ScorerError),
}

/// `populate` followed by `score_tree`.
pub fn score_mapping(m: &Model, map: &Mapping, d: &DataSet, theta_miss: f64) -> Result<Score, ScoreMappingError> {
    let mut inst = populate(m, map, d)?.with_theta_miss(theta_miss);
    Ok(score_tree(&mut inst)?)
}
