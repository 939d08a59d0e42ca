//! Several models competing for one scene.
//!
//! Every registered model proposes up to `max_instances` interpretations,
//! each found on the data left over once earlier instances of that model
//! have claimed theirs. Arbitration then keeps the set of instances that best
//! explains the scene:
//!
//! `objective(S) = sum of scores - instance_cost * |S| - unexplained_penalty * u(S)`
//!
//! where `u(S)` counts data with confidence at or above the leaf threshold
//! that no member of `S` binds. An instance whose data are all bound by
//! members scoring at least as well is never kept: it explains nothing new.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{DataSet, Domain};
use crate::inference::{interpret_anchored, recognize, BeamConfig, InferenceError, InterpretationResult, Strategy};
use crate::model::{validate_model, Mapping, Model, ModelError};

/// Largest candidate count arbitrated by exhaustive subset search.
pub const EXACT_ARBITRATION_LIMIT: usize = 12;

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("registry holds no models")]
    Empty,
    #[error("model name `{0}` is not unique")]
    DuplicateName(String),
    #[error("model `{0}` has no domain-specific scorer")]
    NoDomain(String),
    #[error("model `{name}` reads {found} data, registry is {expected}")]
    MixedDomain { name: String, expected: Domain, found: Domain },
    #[error("model `{name}`: {source}")]
    Model { name: String, source: ModelError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Named models sharing one domain.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelRegistry {
    domain: Domain,
    models: BTreeMap<String, Model>,
}

impl ModelRegistry {
    pub fn new(models: Vec<Model>) -> Result<ModelRegistry, RegistryError> {
        let mut domain = None;
        let mut map = BTreeMap::new();
        for m in models {
            let report = validate_model(&m);
            if !report.is_valid() {
                return Err(RegistryError::Model { name: m.name.clone(), source: ModelError::Invalid(report) });
            }
            let d = m.domain().ok_or_else(|| RegistryError::NoDomain(m.name.clone()))?;
            match domain {
                None => domain = Some(d),
                Some(expected) if expected != d => {
                    return Err(RegistryError::MixedDomain { name: m.name.clone(), expected, found: d })
                }
                _ => {}
            }
            if map.contains_key(&m.name) {
                return Err(RegistryError::DuplicateName(m.name.clone()));
            }
            map.insert(m.name.clone(), m);
        }
        let domain = domain.ok_or(RegistryError::Empty)?;
        Ok(ModelRegistry { domain, models: map })
    }

    /// Load every `*.json` model document in `dir`.
    pub fn load_dir(dir: &Path) -> Result<ModelRegistry, RegistryError> {
        let io = |source| RegistryError::Io { path: dir.to_path_buf(), source };
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(io)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        let mut models = Vec::new();
        for path in paths {
            let text = fs::read_to_string(&path).map_err(|source| RegistryError::Io { path: path.clone(), source })?;
            let m = crate::model::load_model(&text).map_err(|source| RegistryError::Model {
                name: path.display().to_string(),
                source,
            })?;
            models.push(m);
        }
        ModelRegistry::new(models)
    }

    /// Write each model to `dir/<name>.json`, replacing files atomically.
    pub fn save_dir(&self, dir: &Path) -> Result<(), RegistryError> {
        let io = |source| RegistryError::Io { path: dir.to_path_buf(), source };
        fs::create_dir_all(dir).map_err(io)?;
        for (name, m) in &self.models {
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
            tmp.write_all(m.to_json().as_bytes()).map_err(io)?;
            tmp.write_all(b"\n").map_err(io)?;
            tmp.persist(dir.join(format!("{name}.json"))).map_err(|e| io(e.error))?;
        }
        Ok(())
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn get(&self, name: &str) -> Option<&Model> {
        self.models.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.models.keys().map(String::as_str)
    }

    pub fn models(&self) -> impl Iterator<Item = &Model> {
        self.models.values()
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// Registry restricted to `names`; unknown names are ignored.
    pub fn subset(&self, names: &[&str]) -> Result<ModelRegistry, RegistryError> {
        ModelRegistry::new(names.iter().filter_map(|n| self.get(n).cloned()).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArbitrationConfig {
    /// Cost of each selected instance.
    pub instance_cost: f64,
    /// Penalty per salient datum no selected instance binds.
    pub unexplained_penalty: f64,
    /// Score an instance needs to be selectable.
    pub accept_threshold: f64,
    pub max_instances: usize,
}

impl Default for ArbitrationConfig {
    fn default() -> Self {
        ArbitrationConfig { instance_cost: 0.6, unexplained_penalty: 0.15, accept_threshold: 0.5, max_instances: 3 }
    }
}

/// Everything needed to interpret one scene.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SceneConfig {
    pub beam: BeamConfig,
    pub arbitration: ArbitrationConfig,
}

impl SceneConfig {
    pub fn validate(&self) -> Result<(), WorkspaceError> {
        self.beam.validate()?;
        let a = &self.arbitration;
        if a.instance_cost < 0.0 || a.unexplained_penalty < 0.0 || !(0.0..=1.0).contains(&a.accept_threshold) {
            return Err(WorkspaceError::Config(format!(
                "need instance_cost, unexplained_penalty >= 0 and accept_threshold in [0, 1]; got {a:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum WorkspaceError {
    #[error("registry holds {registry} models but the data set is {data}")]
    DomainMismatch { registry: Domain, data: Domain },
    #[error("invalid scene configuration: {0}")]
    Config(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error(transparent)]
    Inference(#[from] InferenceError),
}

/// One model instance found in a scene.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Proposal {
    pub model: String,
    /// Order in which the instance was found for its model.
    pub instance: usize,
    /// Imposed from outside rather than found by proposal.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub forced: bool,
    pub result: InterpretationResult,
}

impl Proposal {
    pub fn score(&self) -> f64 {
        self.result.score
    }

    pub fn datum_ids(&self) -> BTreeSet<&str> {
        self.result.mapping.datum_ids()
    }
}

/// Selected instances, the data they explain, and the objective value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneInterpretation {
    pub selected: Vec<Proposal>,
    pub explained: BTreeSet<String>,
    pub objective: f64,
}

impl SceneInterpretation {
    pub fn labels(&self) -> Vec<&str> {
        self.selected.iter().map(|p| p.model.as_str()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("scene serializes")
    }
}

fn check_domain(reg: &ModelRegistry, d: &DataSet) -> Result<(), WorkspaceError> {
    if reg.domain() != d.domain() {
        return Err(WorkspaceError::DomainMismatch { registry: reg.domain(), data: d.domain() });
    }
    Ok(())
}

/// Candidate instances of every model, found with projection.
pub fn propose(reg: &ModelRegistry, d: &DataSet, cfg: &SceneConfig) -> Result<Vec<Proposal>, WorkspaceError> {
    propose_with(reg, d, cfg, Strategy::Projection)
}

/// [`propose`] with an explicit search strategy.
pub fn propose_with(
    reg: &ModelRegistry,
    d: &DataSet,
    cfg: &SceneConfig,
    strategy: Strategy,
) -> Result<Vec<Proposal>, WorkspaceError> {
    cfg.validate()?;
    check_domain(reg, d)?;
    let models: Vec<&Model> = reg.models().collect();
    let per_model: Vec<Vec<Proposal>> = models
        .par_iter()
        .map(|m| propose_model(m, d, cfg, strategy))
        .collect::<Result<_, _>>()?;
    Ok(per_model.into_iter().flatten().collect())
}

fn propose_model(m: &Model, d: &DataSet, cfg: &SceneConfig, strategy: Strategy) -> Result<Vec<Proposal>, WorkspaceError> {
    let floor = cfg.arbitration.accept_threshold / 2.0;
    let mut masked: BTreeSet<String> = BTreeSet::new();
    let mut out = Vec::new();
    for instance in 0..cfg.arbitration.max_instances {
        let rest = d.without(&masked);
        if rest.is_empty() {
            break;
        }
        let result = recognize(m, &rest, &cfg.beam, strategy)?;
        if result.score < floor || result.mapping.is_empty() {
            break;
        }
        masked.extend(result.mapping.datum_ids().into_iter().map(str::to_string));
        log::debug!("{} instance {instance}: score {:.4}", m.name, result.score);
        out.push(Proposal { model: m.name.clone(), instance, forced: false, result });
    }
    Ok(out)
}

/// Interpretation of `m` with `anchors` pinned and the rest found by
/// projection.
pub fn force_mapping(
    m: &Model,
    d: &DataSet,
    anchors: &Mapping,
    cfg: &BeamConfig,
) -> Result<InterpretationResult, WorkspaceError> {
    Ok(interpret_anchored(m, d, anchors, cfg)?)
}

struct Pool<'a> {
    cands: Vec<&'a Proposal>,
    cover: Vec<BTreeSet<usize>>,
    forced: Vec<bool>,
    salient: Vec<bool>,
    lambda: f64,
    mu: f64,
}

impl<'a> Pool<'a> {
    fn new(cands: Vec<&'a Proposal>, d: &DataSet, cfg: &SceneConfig) -> Pool<'a> {
        let cover = cands
            .iter()
            .map(|p| p.result.mapping.datum_ids().iter().filter_map(|id| d.position(id)).collect())
            .collect();
        Pool {
            forced: cands.iter().map(|p| p.forced).collect(),
            cands,
            cover,
            salient: d.data().iter().map(|x| x.confidence >= cfg.beam.leaf_threshold).collect(),
            lambda: cfg.arbitration.instance_cost,
            mu: cfg.arbitration.unexplained_penalty,
        }
    }

    /// Objective of the members in `set` (indices in ascending order).
    fn objective(&self, set: &[usize]) -> f64 {
        let mut covered = vec![false; self.salient.len()];
        for &i in set {
            for &x in &self.cover[i] {
                covered[x] = true;
            }
        }
        let unexplained = self.salient.iter().zip(&covered).filter(|(s, c)| **s && !**c).count();
        let total: f64 = set.iter().map(|&i| self.cands[i].score()).sum();
        total - self.lambda * set.len() as f64 - self.mu * unexplained as f64
    }

    /// No unforced member's data are all bound by other members, and every
    /// forced candidate is present.
    fn admissible(&self, set: &[usize]) -> bool {
        if (0..self.cands.len()).any(|i| self.forced[i] && !set.contains(&i)) {
            return false;
        }
        set.iter().all(|&c| {
            if self.forced[c] {
                return true;
            }
            let mut union: BTreeSet<usize> = BTreeSet::new();
            for &o in set {
                if o != c {
                    union.extend(&self.cover[o]);
                }
            }
            !self.cover[c].is_subset(&union)
        })
    }

    fn key(&self, set: &[usize]) -> Vec<(&str, usize)> {
        let mut k: Vec<(&str, usize)> = set.iter().map(|&i| (self.cands[i].model.as_str(), self.cands[i].instance)).collect();
        k.sort();
        k
    }

    /// Is `a` preferred over `b`: higher objective, then fewer members,
    /// then smaller (model name, instance) list.
    fn better(&self, a: &[usize], oa: f64, b: &[usize], ob: f64) -> bool {
        if (oa - ob).abs() > 1e-12 {
            return oa > ob;
        }
        if a.len() != b.len() {
            return a.len() < b.len();
        }
        self.key(a) < self.key(b)
    }

    fn exact(&self) -> Vec<usize> {
        let n = self.cands.len();
        let mut best: Option<(Vec<usize>, f64)> = None;
        for mask in 0u32..(1u32 << n) {
            let set: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            if !self.admissible(&set) {
                continue;
            }
            let o = self.objective(&set);
            if best.as_ref().is_none_or(|(bs, bo)| self.better(&set, o, bs, *bo)) {
                best = Some((set, o));
            }
        }
        best.map(|b| b.0).unwrap_or_default()
    }

    fn greedy(&self) -> Vec<usize> {
        let n = self.cands.len();
        let mut set: Vec<usize> = (0..n).filter(|&i| self.forced[i]).collect();
        let mut obj = self.objective(&set);
        loop {
            // Best single move: add, drop, or swap one member.
            let mut moves: Vec<Vec<usize>> = Vec::new();
            for i in 0..n {
                if set.contains(&i) {
                    if !self.forced[i] {
                        moves.push(set.iter().copied().filter(|&x| x != i).collect());
                        for j in (0..n).filter(|j| !set.contains(j)) {
                            let mut s: Vec<usize> = set.iter().copied().filter(|&x| x != i).collect();
                            s.push(j);
                            s.sort_unstable();
                            moves.push(s);
                        }
                    }
                } else {
                    let mut s = set.clone();
                    s.push(i);
                    s.sort_unstable();
                    moves.push(s);
                }
            }
            let mut best: Option<(Vec<usize>, f64)> = None;
            for s in moves {
                if !self.admissible(&s) {
                    continue;
                }
                let o = self.objective(&s);
                if o > obj + 1e-12 && best.as_ref().is_none_or(|(bs, bo)| self.better(&s, o, bs, *bo)) {
                    best = Some((s, o));
                }
            }
            match best {
                Some((s, o)) => {
                    set = s;
                    obj = o;
                }
                None => return set,
            }
        }
    }

    fn finish(&self, set: Vec<usize>, d: &DataSet) -> SceneInterpretation {
        let mut selected: Vec<Proposal> = set.iter().map(|&i| self.cands[i].clone()).collect();
        selected.sort_by(|a, b| (a.model.as_str(), a.instance).cmp(&(b.model.as_str(), b.instance)));
        let explained: BTreeSet<String> = set
            .iter()
            .flat_map(|&i| self.cover[i].iter().map(|&x| d.data()[x].id.clone()))
            .collect();
        let objective = scene_objective(&selected, d, &self.salient, self.lambda, self.mu);
        SceneInterpretation { selected, explained, objective }
    }
}

fn scene_objective(selected: &[Proposal], d: &DataSet, salient: &[bool], lambda: f64, mu: f64) -> f64 {
    let explained: BTreeSet<&str> = selected.iter().flat_map(|p| p.datum_ids()).collect();
    let unexplained = d
        .data()
        .iter()
        .zip(salient)
        .filter(|(x, s)| **s && !explained.contains(x.id.as_str()))
        .count();
    let total: f64 = selected.iter().map(Proposal::score).sum();
    total - lambda * selected.len() as f64 - mu * unexplained as f64
}

/// How arbitration searches subsets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Search {
    /// Exhaustive when there are at most [`EXACT_ARBITRATION_LIMIT`]
    /// eligible candidates, greedy otherwise.
    Auto,
    Exact,
    Greedy,
}

/// Keep the set of eligible candidates that best explains `d`.
pub fn arbitrate(cands: &[Proposal], d: &DataSet, cfg: &SceneConfig) -> SceneInterpretation {
    arbitrate_by(cands, d, cfg, Search::Auto)
}

/// [`arbitrate`] with a chosen subset search. `Exact` panics beyond 30
/// eligible candidates.
pub fn arbitrate_by(cands: &[Proposal], d: &DataSet, cfg: &SceneConfig, search: Search) -> SceneInterpretation {
    let eligible: Vec<&Proposal> = cands
        .iter()
        .filter(|p| p.forced || p.score() >= cfg.arbitration.accept_threshold)
        .collect();
    let pool = Pool::new(eligible, d, cfg);
    let exact = match search {
        Search::Auto => pool.cands.len() <= EXACT_ARBITRATION_LIMIT,
        Search::Exact => {
            assert!(pool.cands.len() <= 30, "exact arbitration over too many candidates");
            true
        }
        Search::Greedy => false,
    };
    let set = if exact { pool.exact() } else { pool.greedy() };
    pool.finish(set, d)
}

/// [`arbitrate`] with `forced` instances as mandatory members.
pub fn arbitrate_with_forced(
    cands: &[Proposal],
    forced: &[Proposal],
    d: &DataSet,
    cfg: &SceneConfig,
) -> SceneInterpretation {
    let mut all: Vec<Proposal> = forced.iter().cloned().map(|mut p| {
        p.forced = true;
        p
    }).collect();
    all.extend(cands.iter().cloned());
    arbitrate(&all, d, cfg)
}

/// `propose` then `arbitrate`.
pub fn interpret_scene(
    reg: &ModelRegistry,
    d: &DataSet,
    cfg: &SceneConfig,
    strategy: Strategy,
) -> Result<SceneInterpretation, WorkspaceError> {
    let cands = propose_with(reg, d, cfg, strategy)?;
    Ok(arbitrate(&cands, d, cfg))
}
