//! Dispersion-threshold fixation detection on a hand-built gaze stream.
//!
//! ```bash
//! cargo run --example detect_fixations
//! ```

use gaze_intent::{detect_fixations, FixationDetectorConfig, GazeSample};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // 120 Hz: dwell at (400, 300), saccade, dwell at (620, 310), then a
    // blink-like run of low-confidence samples, then a short glance.
    let mut samples = Vec::new();
    let mut t = 0.0;
    let mut push = |x: f64, y: f64, confidence: f64, n: usize| {
        for i in 0..n {
            let jitter = (i % 3) as f64 - 1.0;
            samples.push(GazeSample::new(t, x + jitter, y - jitter, confidence));
            t += 1000.0 / 120.0;
        }
    };
    push(400.0, 300.0, 0.95, 30);
    push(510.0, 305.0, 0.90, 2);
    push(620.0, 310.0, 0.95, 24);
    push(620.0, 310.0, 0.10, 6);
    push(200.0, 500.0, 0.95, 8);

    let config = FixationDetectorConfig::default();
    println!(
        "dispersion bound {:.1} px, duration {}..{} ms",
        config.dispersion_max_px(),
        config.dur_min_ms,
        config.dur_max_ms
    );
    for f in detect_fixations(&samples, &config)? {
        println!(
            "fixation at ({:.1}, {:.1}) from {:.1} ms for {:.1} ms",
            f.x, f.y, f.t_start_ms, f.duration_ms
        );
    }
    Ok(())
}
