use std::collections::BTreeMap;

use super::*;
use crate::data::{Datum, Event, Segment};
use crate::model::{score_mapping, Element, Level};
use crate::scorers::ScorerSpec;

fn ev(id: &str, t: i64, label: &str, c: f64) -> Datum {
    Datum::new(id, Payload::Event(Event { timestamp: t, label: label.into(), agent: "p".into() }), c)
}

fn label(leaf: &str, l: &str) -> ScorerSpec {
    ScorerSpec::LabelMatch { args: vec![leaf.into()], labels: vec![l.into()], partial: BTreeMap::new() }
}

/// carry then contact three ticks later.
fn pair_model() -> Model {
    let top = ScorerSpec::Conjunction {
        children: vec![
            label("a", "carry"),
            label("b", "contact"),
            ScorerSpec::TimeGap { args: vec!["a".into(), "b".into()], gap: 3.0, tolerance: 1.5 },
        ],
        weights: vec![0.25, 0.25, 0.5],
    };
    Model {
        name: "pair".into(),
        levels: vec![
            Level { index: 1, elements: vec![Element::slot("a"), Element::slot("b")] },
            Level { index: 2, elements: vec![Element::composite("top", &["a", "b"], top)] },
        ],
    }
}

fn three_leaf_model() -> Model {
    let gap = |a: &str, b: &str| ScorerSpec::TimeGap { args: vec![a.into(), b.into()], gap: 2.0, tolerance: 1.0 };
    Model {
        name: "chain".into(),
        levels: vec![
            Level { index: 1, elements: vec![Element::slot("x"), Element::slot("y"), Element::slot("z")] },
            Level {
                index: 2,
                elements: vec![
                    Element::composite("xy", &["x", "y"], gap("x", "y")),
                    Element::composite("zz", &["z"], label("z", "c")),
                ],
            },
            Level { index: 3, elements: vec![Element::composite("top", &["xy", "zz"], gap("y", "z"))] },
        ],
    }
}

fn stream(data: Vec<Datum>) -> DataSet {
    DataSet::new(Domain::Temporal, data).unwrap()
}

#[test]
fn empty_data_gives_empty_table_and_floor_result() {
    let m = pair_model();
    let d = DataSet::empty(Domain::Temporal);
    let table = bottom_up_pass(&m, &d, &BeamConfig::default()).unwrap();
    assert!(table.is_empty());
    let r = interpret(&m, &d, &BeamConfig::default()).unwrap();
    assert!(r.mapping.is_empty());
    let floor = score_mapping(&m, &Mapping::new(), &d, DEFAULT_THETA_MISS).unwrap().value();
    assert_eq!(r.score, floor);
}

#[test]
fn data_below_leaf_threshold_are_not_admitted() {
    let m = pair_model();
    let d = stream(vec![ev("e1", 1, "carry", 0.2), ev("e2", 4, "contact", 0.3)]);
    assert!(bottom_up_pass(&m, &d, &BeamConfig::default()).unwrap().is_empty());
}

#[test]
fn beam_width_bounds_every_element_beam() {
    let m = three_leaf_model();
    let d = stream((0..6).map(|i| ev(&format!("e{i}"), i, "c", 0.9)).collect());
    let cfg = BeamConfig { beam_width: 1, ..BeamConfig::default() };
    let table = bottom_up_pass(&m, &d, &cfg).unwrap();
    for beam in table.beams() {
        assert_eq!(beam.len(), 1, "{}", beam.element);
    }
    assert_eq!(table.level(2).len(), 2);
    assert_eq!(table.level(3).len(), 1);
}

#[test]
fn beams_are_sorted_and_deduplicated() {
    let m = three_leaf_model();
    let d = stream((0..5).map(|i| ev(&format!("e{i}"), i * 2, "c", 0.5 + 0.1 * i as f64)).collect());
    let table = bottom_up_pass(&m, &d, &BeamConfig { beam_width: 50, ..BeamConfig::default() }).unwrap();
    for beam in table.beams() {
        let s = beam.scores();
        assert!(s.windows(2).all(|w| w[0] >= w[1]));
        let cands = table.beam(&beam.element).unwrap();
        let mut maps: Vec<&Mapping> = cands.iter().map(|c| &c.mapping).collect();
        maps.sort();
        maps.dedup();
        assert_eq!(maps.len(), cands.len());
    }
}

#[test]
fn candidate_scores_match_the_hierarchical_score() {
    let m = three_leaf_model();
    let d = stream(vec![ev("e0", 0, "a", 0.8), ev("e1", 2, "b", 0.9), ev("e2", 4, "c", 0.7)]);
    let table = bottom_up_pass(&m, &d, &BeamConfig::default()).unwrap();
    for cand in table.level(3) {
        let s = score_mapping(&m, &cand.mapping, &d, DEFAULT_THETA_MISS).unwrap().value();
        assert!((s - cand.score).abs() < 1e-12);
    }
}

#[test]
fn projection_recovers_a_low_confidence_part() {
    let m = pair_model();
    let d = stream(vec![ev("e1", 2, "carry", 0.9), ev("e2", 5, "contact", 0.2), ev("e3", 9, "contact", 0.9)]);
    let cfg = BeamConfig::default();
    let bottom_up = recognize(&m, &d, &cfg, Strategy::BottomUp).unwrap();
    let projected = interpret(&m, &d, &cfg).unwrap();
    assert!(projected.score > bottom_up.score);
    assert_eq!(projected.mapping.get("b"), Some("e2"));
    assert!(projected.revisions() >= 1);
    assert!(projected.is_monotone());
}

#[test]
fn optimal_table_yields_no_revisions() {
    let m = pair_model();
    let d = stream(vec![ev("e1", 2, "carry", 1.0), ev("e2", 5, "contact", 1.0)]);
    let r = interpret(&m, &d, &BeamConfig::default()).unwrap();
    assert_eq!(r.revisions(), 0);
    assert!((r.score - 1.0).abs() < 1e-12);
}

#[test]
fn result_score_equals_recomputed_score() {
    for seed in 0..20 {
        let (m, d) = random_instance(seed);
        let r = interpret(&m, &d, &BeamConfig::default()).unwrap();
        let s = score_mapping(&m, &r.mapping, &d, DEFAULT_THETA_MISS).unwrap().value();
        assert_eq!(s, r.score);
    }
}

#[test]
fn oracle_enumerates_the_whole_space() {
    assert_eq!(mapping_space_size(3, 4), 125);
    assert_eq!(mapping_space_size(6, 8), 531_441);
    assert_eq!(mapping_space_size(0, 8), 1);
}

#[test]
fn oracle_refuses_large_instances() {
    let leaves: Vec<String> = (0..7).map(|i| format!("s{i}")).collect();
    let refs: Vec<&str> = leaves.iter().map(String::as_str).collect();
    let m = Model {
        name: "wide".into(),
        levels: vec![
            Level { index: 1, elements: refs.iter().map(|l| Element::slot(*l)).collect() },
            Level { index: 2, elements: vec![Element::composite("top", &refs, label("s0", "a"))] },
        ],
    };
    let err = brute_force_oracle(&m, &DataSet::empty(Domain::Temporal), 0.3).unwrap_err();
    assert!(matches!(err, InferenceError::TooLarge { leaves: 7, .. }));
    assert!(err.to_string().contains("instance too large"));
}

#[test]
fn exhaustive_search_matches_oracle_on_random_instances() {
    for i in 0..40 {
        let check = OracleCheck::run(i, 7, &BeamConfig::exhaustive()).unwrap();
        assert!(check.passed, "{check:?}");
    }
}

#[test]
fn crippled_search_disagrees_with_oracle_somewhere() {
    let cfg = BeamConfig { beam_width: 1, max_rounds: 0, ..BeamConfig::default() };
    let failures = (0..40).filter(|&i| !OracleCheck::run(i, 7, &cfg).unwrap().passed).count();
    assert!(failures > 0);
}

#[test]
fn random_instances_are_valid_and_small() {
    for seed in 0..200 {
        let (m, d) = random_instance(seed);
        assert!(crate::model::validate_model(&m).is_valid(), "{seed}");
        assert!(m.leaf_ids().len() <= ORACLE_MAX_LEAVES);
        assert!(d.len() <= ORACLE_MAX_DATA);
        assert_eq!(random_instance(seed).0, m);
    }
}

#[test]
fn domain_mismatch_is_rejected() {
    let m = pair_model();
    let d = DataSet::new(
        Domain::Glyph,
        vec![Datum::new("s", Payload::Segment(Segment::between((0.0, 0.0), (1.0, 0.0))), 1.0)],
    )
    .unwrap();
    assert!(matches!(interpret(&m, &d, &BeamConfig::default()), Err(InferenceError::DomainMismatch { .. })));
}

#[test]
fn invalid_config_is_rejected() {
    let cfg = BeamConfig { projection_threshold: 0.5, leaf_threshold: 0.4, ..BeamConfig::default() };
    assert!(matches!(cfg.validate(), Err(InferenceError::Config(_))));
    assert!(BeamConfig::default().validate().is_ok());
}

#[test]
fn repeated_runs_are_identical() {
    let (m, d) = random_instance(99);
    let a = interpret(&m, &d, &BeamConfig::default()).unwrap().to_json();
    let b = interpret(&m, &d, &BeamConfig::default()).unwrap().to_json();
    assert_eq!(a, b);
}

#[test]
fn beam_config_field_list_is_closed() {
    // Adding a field breaks this destructuring at compile time.
    let BeamConfig { beam_width, leaf_threshold, projection_threshold, max_rounds, theta_miss, seed } =
        BeamConfig::default();
    let _ = (beam_width, leaf_threshold, projection_threshold, max_rounds, theta_miss, seed);
    let text = r#"{"beam_width":8,"mode":"novel"}"#;
    assert!(serde_json::from_str::<BeamConfig>(text).is_err());
}

#[test]
fn table_from_other_data_is_rejected() {
    let m = pair_model();
    let d1 = stream(vec![ev("e1", 2, "carry", 0.9)]);
    let d2 = stream(vec![ev("f1", 2, "carry", 0.9)]);
    let table = bottom_up_pass(&m, &d1, &BeamConfig::default()).unwrap();
    assert!(matches!(project_refine(&m, &d2, &table, &BeamConfig::default()), Err(InferenceError::TableMismatch)));
    assert!(project_refine(&m, &d1, &table, &BeamConfig::default()).is_ok());
}

#[test]
fn anchors_are_never_revised() {
    let m = pair_model();
    let d = stream(vec![ev("e1", 2, "carry", 0.9), ev("e2", 5, "contact", 0.9), ev("e3", 20, "carry", 0.9)]);
    let anchors = Mapping::new().with("a", "e3");
    let r = interpret_anchored(&m, &d, &anchors, &BeamConfig::default()).unwrap();
    assert!(r.mapping.extends(&anchors));
    let full = Mapping::new().with("a", "e1").with("b", "e2");
    let r = interpret_anchored(&m, &d, &full, &BeamConfig::default()).unwrap();
    assert_eq!(r.mapping, full);
    assert!(r.trace.is_empty());
    let bad = Mapping::new().with("a", "nope");
    assert!(matches!(
        interpret_anchored(&m, &d, &bad, &BeamConfig::default()),
        Err(InferenceError::Populate(PopulateError::UnknownDatum(_)))
    ));
}
