//! Exhaustive reference search and random small instances to check the beam
//! search against it.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{interpret, prepare, BeamConfig, InferenceError, InterpretationResult};
use crate::data::{DataSet, Datum, Domain, Event, Payload, Segment};
use crate::model::{Element, Level, Model};
use crate::scorers::ScorerSpec;

pub const ORACLE_MAX_LEAVES: usize = 6;
pub const ORACLE_MAX_DATA: usize = 8;

/// Number of mappings the oracle enumerates: `(data + 1)^leaves`.
pub fn mapping_space_size(leaves: usize, data: usize) -> u128 {
    (data as u128 + 1).pow(leaves as u32)
}

/// Highest-scoring mapping over every assignment of leaves to data or to
/// nothing. Leaves are enumerated in id order, data in id order with
/// "unbound" first; the first maximum wins.
pub fn brute_force_oracle(m: &Model, d: &DataSet, theta_miss: f64) -> Result<InterpretationResult, InferenceError> {
    let cfg = BeamConfig { theta_miss, ..BeamConfig::default() };
    let c = prepare(m, d, &cfg)?;
    let (n_leaves, n_data) = (c.leaves.len(), d.len());
    if n_leaves > ORACLE_MAX_LEAVES || n_data > ORACLE_MAX_DATA {
        return Err(InferenceError::TooLarge {
            leaves: n_leaves,
            data: n_data,
            max_leaves: ORACLE_MAX_LEAVES,
            max_data: ORACLE_MAX_DATA,
        });
    }
    let mut leaf_order: Vec<usize> = (0..n_leaves).collect();
    leaf_order.sort_by(|a, b| c.leaves[*a].cmp(&c.leaves[*b]));
    let mut options: Vec<Option<usize>> = vec![None];
    let mut by_id: Vec<usize> = (0..n_data).collect();
    by_id.sort_by(|a, b| d.data()[*a].id.cmp(&d.data()[*b].id));
    options.extend(by_id.into_iter().map(Some));

    let mut digits = vec![0usize; n_leaves];
    let mut binding = vec![None; n_leaves];
    let mut cache = vec![0.0; c.elements.len()];
    let mut best: Option<(Vec<Option<usize>>, f64)> = None;
    loop {
        for (pos, &l) in leaf_order.iter().enumerate() {
            binding[l] = options[digits[pos]];
        }
        let s = c.score_element(c.top(), &binding, d, theta_miss, &mut cache)?;
        if best.as_ref().is_none_or(|(_, b)| s > *b) {
            best = Some((binding.clone(), s));
        }
        // Last leaf in id order varies fastest, giving lexicographic order.
        let mut k = n_leaves;
        loop {
            if k == 0 {
                let (b, score) = best.expect("at least one mapping");
                return Ok(InterpretationResult { mapping: c.mapping_of(&b, d), score, trace: Vec::new() });
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < options.len() {
                break;
            }
            digits[k] = 0;
        }
    }
}

/// Outcome of comparing beam search with the oracle on one instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleCheck {
    pub instance: usize,
    pub leaves: usize,
    pub data: usize,
    pub search_score: f64,
    pub oracle_score: f64,
    pub passed: bool,
}

impl OracleCheck {
    /// Tolerance on the score difference.
    pub const TOLERANCE: f64 = 1e-9;

    /// Compare `interpret` under `cfg` with the oracle on instance `index`
    /// of the family seeded by `seed`.
    pub fn run(index: usize, seed: u64, cfg: &BeamConfig) -> Result<OracleCheck, InferenceError> {
        let (m, d) = random_instance(instance_seed(seed, index));
        let search = interpret(&m, &d, cfg)?;
        let oracle = brute_force_oracle(&m, &d, cfg.theta_miss)?;
        Ok(OracleCheck {
            instance: index,
            leaves: m.leaf_ids().len(),
            data: d.len(),
            search_score: search.score,
            oracle_score: oracle.score,
            passed: (search.score - oracle.score).abs() <= Self::TOLERANCE,
        })
    }
}

/// Seed of instance `index` in the family seeded by `seed`.
pub fn instance_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index as u64)
}

const EVENT_LABELS: [&str; 4] = ["a", "b", "c", "x"];

/// A random valid model with at most 6 leaves and a random data set of at
/// most 8 data in the same domain.
pub fn random_instance(seed: u64) -> (Model, DataSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = if rng.random_bool(0.5) { Domain::Glyph } else { Domain::Temporal };
    let n_leaves = rng.random_range(2..=ORACLE_MAX_LEAVES);
    let leaves: Vec<String> = (0..n_leaves).map(|i| format!("l{i}")).collect();
    let deep = rng.random_bool(0.6);

    let mut levels = vec![Level { index: 1, elements: leaves.iter().map(Element::slot).collect() }];
    if deep {
        // Groups of at least two leaves; neighbours may share a boundary leaf.
        let n_groups = rng.random_range(1..=(n_leaves / 2).min(3));
        let mut bounds: Vec<usize> = (1..n_groups).map(|g| g * n_leaves / n_groups).collect();
        bounds.insert(0, 0);
        bounds.push(n_leaves);
        let mut groups = Vec::new();
        for g in 0..n_groups {
            let mut members: Vec<&str> = leaves[bounds[g]..bounds[g + 1]].iter().map(String::as_str).collect();
            if g + 1 < n_groups && rng.random_bool(0.3) {
                members.push(leaves[bounds[g + 1]].as_str());
            }
            let id = format!("g{g}");
            let scorer = random_scorer(&mut rng, domain, &members);
            groups.push(Element::composite(id, &members, scorer));
        }
        let ids: Vec<String> = groups.iter().map(|g| g.id.clone()).collect();
        let id_refs: Vec<&str> = ids.iter().map(String::as_str).collect();
        levels.push(Level { index: 2, elements: groups });
        let all: Vec<&str> = leaves.iter().map(String::as_str).collect();
        let top = Element::composite("top", &id_refs, random_scorer(&mut rng, domain, &all));
        levels.push(Level { index: 3, elements: vec![top] });
    } else {
        let all: Vec<&str> = leaves.iter().map(String::as_str).collect();
        let top = Element::composite("top", &all, random_scorer(&mut rng, domain, &all));
        levels.push(Level { index: 2, elements: vec![top] });
    }
    let model = Model { name: format!("random-{seed}"), levels };

    let n_data = rng.random_range(0..=ORACLE_MAX_DATA);
    let data = (0..n_data)
        .map(|i| {
            let payload = match domain {
                Domain::Glyph => Payload::Segment(Segment {
                    x: rng.random_range(0.0..4.0),
                    y: rng.random_range(0.0..4.0),
                    orientation: rng.random_range(-180.0..180.0),
                    length: rng.random_range(0.5..2.0),
                }),
                Domain::Temporal => Payload::Event(Event {
                    timestamp: rng.random_range(0..12),
                    label: EVENT_LABELS[rng.random_range(0..EVENT_LABELS.len())].to_string(),
                    agent: "p".into(),
                }),
            };
            Datum::new(format!("d{i}"), payload, rng.random_range(0.0..=1.0))
        })
        .collect();
    let data = DataSet::new(domain, data).expect("generated data are valid");
    (model, data)
}

fn random_scorer(rng: &mut ChaCha8Rng, domain: Domain, leaves: &[&str]) -> ScorerSpec {
    if leaves.len() >= 2 && rng.random_bool(0.25) {
        let w = rng.random_range(0.3..0.7);
        let a = random_relation(rng, domain, leaves);
        let b = random_relation(rng, domain, leaves);
        return ScorerSpec::Conjunction { children: vec![a, b], weights: vec![w, 1.0 - w] };
    }
    random_relation(rng, domain, leaves)
}

fn random_relation(rng: &mut ChaCha8Rng, domain: Domain, leaves: &[&str]) -> ScorerSpec {
    let i = rng.random_range(0..leaves.len());
    let mut j = rng.random_range(0..leaves.len() - 1);
    if j >= i {
        j += 1;
    }
    let args = vec![leaves[i].to_string(), leaves[j].to_string()];
    match domain {
        Domain::Glyph => match rng.random_range(0..4) {
            0 => ScorerSpec::RelativeLocation {
                args,
                dx: rng.random_range(-2.0..2.0),
                dy: rng.random_range(-2.0..2.0),
                tolerance: rng.random_range(0.3..1.0),
            },
            1 => ScorerSpec::SmoothContinuation {
                args,
                turn: rng.random_range(-90.0..90.0),
                gap_tolerance: rng.random_range(0.2..1.0),
                angle_tolerance: rng.random_range(10.0..60.0),
            },
            2 => ScorerSpec::LengthRatio {
                args,
                ratio: rng.random_range(0.5..2.0),
                tolerance: rng.random_range(0.2..0.8),
            },
            _ => ScorerSpec::Parallelism { args, tolerance: rng.random_range(10.0..45.0) },
        },
        Domain::Temporal => match rng.random_range(0..3) {
            0 => ScorerSpec::Precedence {
                args,
                gap: rng.random_range(0.0..5.0),
                tolerance: rng.random_range(1.0..3.0),
            },
            1 => ScorerSpec::TimeGap {
                args,
                gap: rng.random_range(-5.0..5.0),
                tolerance: rng.random_range(1.0..3.0),
            },
            _ => {
                let label = EVENT_LABELS[rng.random_range(0..3)].to_string();
                let mut partial = BTreeMap::new();
                if rng.random_bool(0.5) {
                    partial.insert("x".to_string(), rng.random_range(0.2..0.9));
                }
                ScorerSpec::LabelMatch { args: vec![args[0].clone()], labels: vec![label], partial }
            }
        },
    }
}
