//! Beam search against exhaustive enumeration on small random instances.

use projektor::inference::{BeamConfig, OracleCheck};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let wide = BeamConfig::exhaustive();
    let narrow = BeamConfig { beam_width: 1, max_rounds: 0, ..BeamConfig::exhaustive() };
    for (name, cfg) in [("wide", &wide), ("one-wide, no refinement", &narrow)] {
        let checks = (0..50).map(|i| OracleCheck::run(i, 11, cfg)).collect::<Result<Vec<_>, _>>()?;
        let passed = checks.iter().filter(|c| c.passed).count();
        println!("{name}: {passed} of {} match the oracle", checks.len());
    }
    Ok(())
}
