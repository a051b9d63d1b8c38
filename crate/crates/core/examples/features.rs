//! Distance features of a fixation sequence relative to an object.
//!
//! ```bash
//! cargo run --example features
//! ```

use gaze_intent::features::compute;
use gaze_intent::{FeatureCombination, Fixation, ObjectContext, Point};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let object = ObjectContext {
        centroid: Point::new(500.0, 400.0),
        grasp_thumb: Point::new(440.0, 400.0),
        grasp_index: Point::new(560.0, 400.0),
        shape_id: "square".into(),
    };
    let fixation = |t: f64, x: f64, y: f64| Fixation {
        t_start_ms: t,
        duration_ms: 200.0,
        x,
        y,
    };

    // Grasping gaze clusters near the index-finger contact point.
    let grasp: Vec<Fixation> = [(556.0, 398.0), (561.0, 405.0), (553.0, 401.0), (565.0, 396.0)]
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| fixation(i as f64 * 250.0, x, y))
        .collect();
    // Viewing gaze wanders over the whole object.
    let view: Vec<Fixation> = [(470.0, 360.0), (530.0, 440.0), (500.0, 380.0), (455.0, 430.0)]
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| fixation(i as f64 * 250.0, x, y))
        .collect();

    for (name, fixations) in [("grasp", &grasp), ("view", &view)] {
        let fv = compute(fixations, &object)?;
        println!(
            "{name:>5}: ADF2C {:6.2}  ADF2I {:6.2}  ADF2T {:6.2}  VAR {:7.2}  C4 {:?}",
            fv.adf2c,
            fv.adf2i,
            fv.adf2t,
            fv.var,
            fv.project(FeatureCombination::C4)
        );
    }
    Ok(())
}
