//! Letter recognition over generated glyph scenes and the SVG overlay.

use projektor::data::DataSet;
use projektor::glyph::{
    ak_overlap_spec, build_glyph_library, generate_scene, render_overlay, GlyphFamily, GlyphSceneSpec, LetterPlacement, NoiseParams,
};
use projektor::inference::{instance_seed, Strategy};
use projektor::metrics::{evaluate_metrics, GroundTruth};
use projektor::workspace::{interpret_scene, SceneConfig, SceneInterpretation};

fn bench(noise: NoiseParams, scenes: usize, run: u64, strategy: Strategy) -> f64 {
    let reg = build_glyph_library();
    let cfg = SceneConfig::default();
    let family = GlyphFamily::all_letters();
    let (truths, results): (Vec<GroundTruth>, Vec<SceneInterpretation>) = (0..scenes)
        .map(|i| {
            let seed = instance_seed(run, i);
            let (d, truth) = generate_scene(&family.sample(seed), &NoiseParams { seed, ..noise.clone() }).unwrap();
            (truth, interpret_scene(&reg, &d, &cfg, strategy).unwrap())
        })
        .unzip();
    evaluate_metrics(&truths, &results).unwrap().exact_match
}

#[test]
fn noise_free_letters_are_recognized() {
    let p = bench(NoiseParams::default(), 100, 21, Strategy::Projection);
    let b = bench(NoiseParams::default(), 100, 21, Strategy::BottomUp);
    assert!(p >= 0.98, "{p}");
    assert!((p - b).abs() <= 0.01, "projection {p}, bottom-up {b}");
}

#[test]
fn accuracy_falls_with_dropout() {
    let accuracy: Vec<f64> = [0.0, 0.1, 0.2, 0.3]
        .iter()
        .map(|&dropout| {
            let noise = NoiseParams { jitter: 0.02, dropout, clutter: 3, confidence_sigma: 0.45, ..NoiseParams::default() };
            bench(noise, 100, 22, Strategy::Projection)
        })
        .collect();
    let rises: Vec<f64> = accuracy.windows(2).map(|w| w[1] - w[0]).filter(|d| *d > 0.0).collect();
    assert!(rises.len() <= 1 && rises.iter().all(|d| *d <= 0.02), "{accuracy:?}");
}

fn interpret(d: &DataSet) -> SceneInterpretation {
    interpret_scene(&build_glyph_library(), d, &SceneConfig::default(), Strategy::Projection).unwrap()
}

fn instance_groups(svg: &str) -> Vec<String> {
    let doc = roxmltree::Document::parse(svg).unwrap();
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    doc.descendants()
        .filter(|n| n.attribute("class") == Some("instance"))
        .map(|n| n.descendants().find(|c| c.has_tag_name("title")).and_then(|t| t.text()).unwrap_or_default().to_string())
        .collect()
}

#[test]
fn an_empty_scene_renders_as_valid_svg() {
    let spec = GlyphSceneSpec { letters: vec![], extent: [8.0, 8.0] };
    let (d, _) = generate_scene(&spec, &NoiseParams::default()).unwrap();
    assert!(instance_groups(&render_overlay(&d, &interpret(&d)).unwrap()).is_empty());
}

#[test]
fn one_letter_renders_one_group() {
    let spec = GlyphSceneSpec { letters: vec![LetterPlacement::new("H", 2.0, 2.0)], extent: [8.0, 8.0] };
    let (d, _) = generate_scene(&spec, &NoiseParams::default()).unwrap();
    let groups = instance_groups(&render_overlay(&d, &interpret(&d)).unwrap());
    assert_eq!(groups.len(), 1);
    assert!(groups[0].starts_with('H'), "{groups:?}");
}

#[test]
fn overlapping_a_and_k_render_without_v() {
    let (d, _) = generate_scene(&ak_overlap_spec(2.0, 3.0, 1.0, 0.0), &NoiseParams::default()).unwrap();
    let mut groups = instance_groups(&render_overlay(&d, &interpret(&d)).unwrap());
    groups.sort();
    assert_eq!(groups.len(), 2, "{groups:?}");
    assert!(groups[0].starts_with('A') && groups[1].starts_with('K'), "{groups:?}");
}
