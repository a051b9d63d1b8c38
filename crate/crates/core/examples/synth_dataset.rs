//! Generates a calibrated synthetic dataset and checks its statistics.
//!
//! ```bash
//! cargo run --example synth_dataset
//! ```

use gaze_intent::features::FeatureRecord;
use gaze_intent::synth::{generate_dataset, SynthConfig};
use gaze_intent::TaskLabel;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = SynthConfig {
        n_per_class: 2000,
        ..SynthConfig::with_seed(7)
    };
    let data = generate_dataset(&config)?;
    println!(
        "{} training trials, {} held-out trials",
        data.train.len(),
        data.test.len()
    );
    println!("calibration: {:?}", data.manifest.calibration);

    let records = data
        .train
        .iter()
        .map(FeatureRecord::from_trial)
        .collect::<Result<Vec<_>, _>>()?;
    for (label, target_var, target_count) in [
        (TaskLabel::Grasp, config.target_var_grasp, config.grasp_count_mean),
        (TaskLabel::View, config.target_var_view, config.view_count_mean),
    ] {
        let rows: Vec<&FeatureRecord> = records.iter().filter(|r| r.task_label == label).collect();
        let n = rows.len() as f64;
        let var = rows.iter().map(|r| r.var).sum::<f64>() / n;
        let count = rows.iter().map(|r| r.n_fix as f64).sum::<f64>() / n;
        println!("{label}: mean VAR {var:.2} (target {target_var}), mean fixations {count:.2} (target {target_count})");
    }
    Ok(())
}
