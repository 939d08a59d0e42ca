//! Write an SVG overlay of an interpreted scene. Pass an output path or
//! read the document from stdout.

use projektor::glyph::{ak_overlap_spec, build_glyph_library, generate_scene, render_overlay, NoiseParams};
use projektor::inference::Strategy;
use projektor::workspace::{interpret_scene, SceneConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let noise = NoiseParams { jitter: 0.02, clutter: 5, seed: 4, ..NoiseParams::default() };
    let (data, _) = generate_scene(&ak_overlap_spec(1.0, 3.0, 1.0, 0.0), &noise)?;
    let scene = interpret_scene(&build_glyph_library(), &data, &SceneConfig::default(), Strategy::Projection)?;
    let svg = render_overlay(&data, &scene)?;
    match std::env::args().nth(1) {
        Some(path) => std::fs::write(path, svg)?,
        None => print!("{svg}"),
    }
    Ok(())
}
