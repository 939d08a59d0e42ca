//! Activity classification over generated event streams.

use projektor::data::{DataSet, Domain, Payload};
use projektor::inference::{instance_seed, Strategy};
use projektor::metrics::evaluate_metrics;
use projektor::temporal::{
    build_activity_library, classify_stream, classify_stream_with, generate_stream, Activity, EventStreamSpec, LOAD_MOTION,
    MOTION, NONE_LABEL,
};
use projektor::workspace::{interpret_scene, SceneConfig};

/// `d` with its load-motion event relabeled `motion` at `confidence`.
fn blur_load_motion(d: &DataSet, confidence: f64) -> DataSet {
    let data = d
        .data()
        .iter()
        .cloned()
        .map(|mut x| {
            if let Payload::Event(e) = &mut x.payload {
                if e.label == LOAD_MOTION {
                    e.label = MOTION.into();
                    x.confidence = confidence;
                }
            }
            x
        })
        .collect();
    DataSet::new(Domain::Temporal, data).unwrap()
}

#[test]
fn a_blurred_atomic_action_is_resolved_by_the_activity() {
    let reg = build_activity_library();
    let cfg = SceneConfig::default();
    for activity in [Activity::Load, Activity::Unload] {
        for i in 0..20 {
            let (clean, _) = generate_stream(&EventStreamSpec::clean(activity, instance_seed(11, i))).unwrap();
            for confidence in [0.15, 0.25, 0.35] {
                let d = blur_load_motion(&clean, confidence);
                let (label, scene) = classify_stream(&reg, &d, &cfg).unwrap();
                assert_eq!(label, activity.label(), "seed {i}, confidence {confidence}");
                assert_eq!(scene.selected[0].result.mapping.iter().count(), 4, "the blurred event is re-admitted");
            }
        }
    }
}

#[test]
fn distractor_streams_classify_as_none() {
    let reg = build_activity_library();
    let cfg = SceneConfig::default();
    for i in 0..50 {
        let (d, truth) = generate_stream(&EventStreamSpec::clean(Activity::Distractor, instance_seed(12, i))).unwrap();
        assert!(truth.instances.is_empty());
        assert_eq!(classify_stream(&reg, &d, &cfg).unwrap().0, NONE_LABEL, "seed {i}");
    }
}

#[test]
fn both_modes_agree_on_clean_streams() {
    let reg = build_activity_library();
    let cfg = SceneConfig::default();
    let (mut truths, mut projected, mut bottom_up) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..100 {
        let activity = if i % 2 == 0 { Activity::Load } else { Activity::Unload };
        let (d, truth) = generate_stream(&EventStreamSpec::clean(activity, instance_seed(13, i))).unwrap();
        assert_eq!(classify_stream_with(&reg, &d, &cfg, Strategy::BottomUp).unwrap().0, activity.label());
        truths.push(truth);
        projected.push(interpret_scene(&reg, &d, &cfg, Strategy::Projection).unwrap());
        bottom_up.push(interpret_scene(&reg, &d, &cfg, Strategy::BottomUp).unwrap());
    }
    let p = evaluate_metrics(&truths, &projected).unwrap().exact_match;
    let b = evaluate_metrics(&truths, &bottom_up).unwrap().exact_match;
    assert_eq!(p, 1.0);
    assert!((p - b).abs() <= 0.01, "projection {p}, bottom-up {b}");
}

#[test]
fn streams_are_reproducible_and_deletion_empties_them() {
    let spec = EventStreamSpec { max_shift: 20, ..EventStreamSpec::clean(Activity::Unload, 5) }.with_confusion(0.3);
    assert_eq!(generate_stream(&spec).unwrap(), generate_stream(&spec).unwrap());
    let gone = EventStreamSpec { deletion_rate: 1.0, ..EventStreamSpec::clean(Activity::Load, 5) };
    let (d, truth) = generate_stream(&gone).unwrap();
    assert!(d.is_empty());
    assert!(truth.instances.is_empty());
}

#[test]
fn confused_streams_are_mostly_classified() {
    let reg = build_activity_library();
    let cfg = SceneConfig::default();
    let mut correct = 0;
    for i in 0..100 {
        let activity = if i % 2 == 0 { Activity::Load } else { Activity::Unload };
        let spec = EventStreamSpec::clean(activity, instance_seed(14, i)).with_confusion(0.2);
        let (d, _) = generate_stream(&spec).unwrap();
        correct += usize::from(classify_stream(&reg, &d, &cfg).unwrap().0 == activity.label());
    }
    assert!(correct > 50, "{correct}/100");
}
