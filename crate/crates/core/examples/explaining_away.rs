//! Overlapping A and K hide a complete V; arbitration explains the scene
//! with A and K alone.

use projektor::glyph::{ak_overlap_spec, build_glyph_library, generate_scene, NoiseParams};
use projektor::workspace::{arbitrate, propose, SceneConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reg = build_glyph_library();
    let cfg = SceneConfig::default();
    let (data, _) = generate_scene(&ak_overlap_spec(1.0, 2.0, 1.0, 12.0), &NoiseParams { jitter: 0.02, seed: 1, ..Default::default() })?;
    let candidates = propose(&reg, &data, &cfg)?;
    for p in candidates.iter().filter(|p| p.score() >= cfg.arbitration.accept_threshold) {
        println!("candidate {} #{}: {:.3}", p.model, p.instance, p.score());
    }
    let scene = arbitrate(&candidates, &data, &cfg);
    println!("selected {:?}, objective {:.3}", scene.labels(), scene.objective);
    Ok(())
}
