//! The same four events read as loading or unloading depending on order.

use projektor::temporal::{build_activity_library, classify_stream, generate_stream, reverse_stream, Activity, EventStreamSpec};
use projektor::workspace::SceneConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reg = build_activity_library();
    let cfg = SceneConfig::default();
    let (stream, _) = generate_stream(&EventStreamSpec::clean(Activity::Load, 2))?;
    for d in [stream.clone(), reverse_stream(&stream)] {
        let events: Vec<String> = d
            .data()
            .iter()
            .filter_map(|x| x.payload.as_event())
            .map(|e| format!("{}@{}", e.label, e.timestamp))
            .collect();
        let (label, scene) = classify_stream(&reg, &d, &cfg)?;
        println!("{} -> {label} ({:.3})", events.join(" "), scene.selected.first().map_or(0.0, |p| p.score()));
    }
    let noisy = EventStreamSpec::clean(Activity::Load, 7).with_confusion(0.5);
    let (d, _) = generate_stream(&noisy)?;
    println!("with ambiguous labels -> {}", classify_stream(&reg, &d, &cfg)?.0);
    Ok(())
}
