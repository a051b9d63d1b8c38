//! Sliding-window intention recognition over a replayed gaze stream.
//!
//! ```bash
//! cargo run --release --example streaming
//! ```

use std::sync::Arc;

use gaze_intent::rng::derive;
use gaze_intent::stream::{synthetic_default_model, REPLAY_GAP_MS, REPLAY_RATE_HZ};
use gaze_intent::synth::{rasterize_for, Generator, Shape, SynthConfig};
use gaze_intent::{Session, TaskLabel, WindowConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = WindowConfig::default();
    let model = Arc::new(synthetic_default_model(1, &config)?);
    let generator = Generator::new(SynthConfig::with_seed(5))?;

    for task in [TaskLabel::Grasp, TaskLabel::View] {
        let trial = generator.generate_trial(task, Shape::Cross, &mut derive(5, 1))?;
        let samples = rasterize_for(&trial, REPLAY_RATE_HZ, 5000.0, REPLAY_GAP_MS);
        let mut session = Session::new(trial.object.clone(), Arc::clone(&model), config)?;

        println!("{task} replay, {} samples", samples.len());
        // Deliver in uneven chunks as a network client would.
        for chunk in samples.chunks(17) {
            for event in session.push_samples(chunk)? {
                println!(
                    "  t = {:6.0} ms  {:<12}  fixations {:2}{}",
                    event.t_ms,
                    format!("{:?}", event.label),
                    event.fixations.len(),
                    if event.fired { "  FIRED" } else { "" }
                );
            }
        }
    }
    Ok(())
}
