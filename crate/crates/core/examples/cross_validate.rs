//! Repeated stratified 5-fold cross-validation over the full grid of feature
//! combinations and classifiers, plus held-out-shape accuracy.
//!
//! ```bash
//! cargo run --release --example cross_validate
//! ```

use gaze_intent::features::FeatureRecord;
use gaze_intent::learn::{full_grid, repeated_eval, Hyperparams};
use gaze_intent::synth::{generate_dataset, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = generate_dataset(&SynthConfig::with_seed(11))?;
    let to_records = |trials: &[gaze_intent::Trial]| {
        trials
            .iter()
            .map(FeatureRecord::from_trial)
            .collect::<Result<Vec<_>, _>>()
    };
    let train = to_records(&data.train)?;
    let test2 = to_records(&data.test)?;

    let table = repeated_eval(&train, Some(&test2), &full_grid(), 10, 5, &Hyperparams::default(), 11)?;
    println!("{:<4} {:<6} {:>12} {:>12}", "comb", "kind", "test1", "test2");
    for cell in &table.cells {
        println!(
            "{:<4} {:<6} {:>6.3}±{:.3} {:>12.3}",
            format!("{:?}", cell.combination),
            cell.kind.short_name(),
            cell.test1.mean_accuracy,
            cell.test1.std_accuracy,
            cell.test2.as_ref().map_or(f64::NAN, |r| r.mean_accuracy)
        );
    }
    Ok(())
}
