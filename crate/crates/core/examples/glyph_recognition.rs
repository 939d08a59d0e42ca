//! Recognize two noisy letters among clutter.

use projektor::glyph::{build_glyph_library, generate_scene, GlyphSceneSpec, LetterPlacement, NoiseParams};
use projektor::inference::Strategy;
use projektor::workspace::{interpret_scene, SceneConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = GlyphSceneSpec {
        letters: vec![
            LetterPlacement { letter: "H".into(), x: 1.0, y: 1.0, scale: 1.0, rotation: 10.0 },
            LetterPlacement { letter: "T".into(), x: 8.0, y: 1.5, scale: 1.1, rotation: -5.0 },
        ],
        extent: [13.0, 8.0],
    };
    let noise = NoiseParams { jitter: 0.02, clutter: 4, confidence_sigma: 0.1, seed: 3, ..NoiseParams::default() };
    let (data, truth) = generate_scene(&spec, &noise)?;
    let scene = interpret_scene(&build_glyph_library(), &data, &SceneConfig::default(), Strategy::Projection)?;
    println!("{} segments, truth {:?}", data.len(), truth.labels());
    for p in &scene.selected {
        println!("{} score {:.3} binds {} segments", p.model, p.score(), p.result.mapping.len());
    }
    println!("objective {:.3}", scene.objective);
    Ok(())
}
