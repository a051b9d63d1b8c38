//! Permutation F-tests of each feature between grasping and viewing.
//!
//! ```bash
//! cargo run --release --example significance
//! ```

use gaze_intent::features::FeatureRecord;
use gaze_intent::stats::{one_way_f_test, significance_csv, significance_table};
use gaze_intent::synth::{generate_dataset, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Small groups are enumerated exactly.
    let toy = one_way_f_test(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]], 10_000, 0)?;
    println!(
        "toy: F = {}, p = {} over {} assignments (exact: {})",
        toy.f_statistic, toy.p_value, toy.n_permutations, toy.exact
    );

    let data = generate_dataset(&SynthConfig::with_seed(3))?;
    let records = data
        .train
        .iter()
        .map(FeatureRecord::from_trial)
        .collect::<Result<Vec<_>, _>>()?;
    let rows = significance_table(&records, 10_000, 3)?;
    print!("{}", significance_csv(&rows));
    Ok(())
}
