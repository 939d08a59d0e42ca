//! Ground truth and recognition metrics shared by both demo domains.
//!
//! A selected instance matches a truth instance when the labels agree and at
//! least [`MATCH_AGREEMENT`] of the truth's bindings appear in the selected
//! mapping. Matching is one-to-one; each truth takes the unmatched selected
//! instance with the highest agreement.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Mapping;
use crate::workspace::SceneInterpretation;

/// Fraction of truth bindings a selected instance must reproduce.
pub const MATCH_AGREEMENT: f64 = 0.7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthInstance {
    pub label: String,
    pub mapping: Mapping,
}

/// The instances a generator placed in a scene; every binding references a
/// generated datum.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruth {
    pub instances: Vec<TruthInstance>,
}

impl GroundTruth {
    pub fn labels(&self) -> Vec<&str> {
        self.instances.iter().map(|t| t.label.as_str()).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LabelMetrics {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub scenes: usize,
    pub precision: f64,
    pub recall: f64,
    /// Scenes whose selection matches the truth one-to-one with nothing extra.
    pub exact_match: f64,
    /// Mean score of all selected instances.
    pub mean_score: f64,
    pub per_label: BTreeMap<String, LabelMetrics>,
}

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("{truths} ground truths but {results} results")]
    LengthMismatch { truths: usize, results: usize },
}

/// Fraction of `truth`'s bindings that `found` reproduces; 1 for an empty truth.
pub fn agreement(truth: &Mapping, found: &Mapping) -> f64 {
    if truth.is_empty() {
        return 1.0;
    }
    let same = truth.iter().filter(|(l, d)| found.get(l) == Some(d)).count();
    same as f64 / truth.len() as f64
}

/// For each truth instance, the index of the selected instance it matched.
pub fn match_scene(truth: &GroundTruth, scene: &SceneInterpretation) -> Vec<Option<usize>> {
    let mut taken = vec![false; scene.selected.len()];
    truth
        .instances
        .iter()
        .map(|t| {
            let mut best: Option<(usize, f64)> = None;
            for (i, p) in scene.selected.iter().enumerate() {
                if taken[i] || p.model != t.label {
                    continue;
                }
                let a = agreement(&t.mapping, &p.result.mapping);
                if a >= MATCH_AGREEMENT && best.is_none_or(|(_, b)| a > b) {
                    best = Some((i, a));
                }
            }
            if let Some((i, _)) = best {
                taken[i] = true;
            }
            best.map(|b| b.0)
        })
        .collect()
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

pub fn evaluate_metrics(truths: &[GroundTruth], results: &[SceneInterpretation]) -> Result<Metrics, MetricsError> {
    if truths.len() != results.len() {
        return Err(MetricsError::LengthMismatch { truths: truths.len(), results: results.len() });
    }
    let mut per_label: BTreeMap<String, LabelMetrics> = BTreeMap::new();
    let (mut tp, mut fp, mut fneg, mut exact) = (0, 0, 0, 0);
    let (mut score_sum, mut selected) = (0.0, 0usize);
    for (truth, scene) in truths.iter().zip(results) {
        let matches = match_scene(truth, scene);
        let mut used = vec![false; scene.selected.len()];
        for (t, m) in truth.instances.iter().zip(&matches) {
            let entry = per_label.entry(t.label.clone()).or_default();
            match m {
                Some(i) => {
                    used[*i] = true;
                    entry.true_positives += 1;
                    tp += 1;
                }
                None => {
                    entry.false_negatives += 1;
                    fneg += 1;
                }
            }
        }
        for (p, u) in scene.selected.iter().zip(&used) {
            score_sum += p.result.score;
            selected += 1;
            if !u {
                per_label.entry(p.model.clone()).or_default().false_positives += 1;
                fp += 1;
            }
        }
        if matches.iter().all(Option::is_some) && used.iter().all(|u| *u) {
            exact += 1;
        }
    }
    for m in per_label.values_mut() {
        m.precision = ratio(m.true_positives, m.true_positives + m.false_positives);
        m.recall = ratio(m.true_positives, m.true_positives + m.false_negatives);
    }
    Ok(Metrics {
        scenes: truths.len(),
        precision: ratio(tp, tp + fp),
        recall: ratio(tp, tp + fneg),
        exact_match: ratio(exact, truths.len()),
        mean_score: if selected == 0 { 0.0 } else { score_sum / selected as f64 },
        per_label,
    })
}
