//! Exact-match accuracy with and without the top-down pass on noisy letters.

use projektor::glyph::{build_glyph_library, generate_scene, GlyphFamily, NoiseParams};
use projektor::inference::{instance_seed, Strategy};
use projektor::metrics::evaluate_metrics;
use projektor::workspace::{interpret_scene, SceneConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reg = build_glyph_library();
    let cfg = SceneConfig::default();
    let family = GlyphFamily::all_letters();
    let (mut truths, mut projected, mut bottom_up) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..60 {
        let seed = instance_seed(5, i);
        let noise = NoiseParams { jitter: 0.02, dropout: 0.2, clutter: 3, confidence_sigma: 0.45, seed, ..Default::default() };
        let (data, truth) = generate_scene(&family.sample(seed), &noise)?;
        projected.push(interpret_scene(&reg, &data, &cfg, Strategy::Projection)?);
        bottom_up.push(interpret_scene(&reg, &data, &cfg, Strategy::BottomUp)?);
        truths.push(truth);
    }
    let p = evaluate_metrics(&truths, &projected)?;
    let b = evaluate_metrics(&truths, &bottom_up)?;
    println!("projection exact match {:.3}, recall {:.3}", p.exact_match, p.recall);
    println!("bottom-up  exact match {:.3}, recall {:.3}", b.exact_match, b.recall);
    Ok(())
}
