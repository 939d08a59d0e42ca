//! Pin part of an interpretation and let projection complete the rest.

use projektor::glyph::{build_glyph_library, generate_scene, GlyphSceneSpec, LetterPlacement, NoiseParams};
use projektor::inference::BeamConfig;
use projektor::model::Mapping;
use projektor::workspace::force_mapping;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = GlyphSceneSpec { letters: vec![LetterPlacement::new("E", 2.0, 2.0)], extent: [8.0, 8.0] };
    let (data, truth) = generate_scene(&spec, &NoiseParams { jitter: 0.02, clutter: 3, seed: 9, ..Default::default() })?;
    let reg = build_glyph_library();
    let stem = truth.instances[0].mapping.get("stem_0").expect("stem is drawn");
    // Read the E's stem as the stem of an F.
    let anchors = Mapping::new().with("stem_0", stem);
    let r = force_mapping(reg.get("F").expect("F ships"), &data, &anchors, &BeamConfig::default())?;
    println!("F forced onto the stem of an E: score {:.3}", r.score);
    for (leaf, id) in r.mapping.iter() {
        println!("  {leaf} -> {id}");
    }
    Ok(())
}
