//! The O model applied, through the ordinary call, to rings that were
//! never drawn as letters.

use projektor::glyph::{build_glyph_library, generate_ring, RingParams};
use projektor::inference::{interpret, BeamConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reg = build_glyph_library();
    let o = reg.get("O").expect("O ships with the library");
    for seed in 0..5 {
        let (data, ring) = generate_ring(&RingParams { seed, ..RingParams::default() });
        let r = interpret(o, &data, &BeamConfig::default())?;
        let on_ring = r.mapping.iter().filter(|(_, id)| ring.iter().any(|c| c == id)).count();
        println!("ring {seed}: score {:.3}, {on_ring} of {} bindings on the ring", r.score, r.mapping.len());
    }
    Ok(())
}
