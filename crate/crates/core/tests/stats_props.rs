use gaze_intent::features::{Feature, FeatureRecord};
use gaze_intent::stats::{one_way_f_test, significance_csv, significance_table, task_groups, TaskPair};
use gaze_intent::synth::{generate_dataset, SynthConfig};
use proptest::prelude::*;

fn groups() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec(-100.0..100.0f64, 2..25),
        prop::collection::vec(-100.0..100.0f64, 2..25),
    )
}

/// Hand-rolled F for two groups.
fn oracle_f(a: &[f64], b: &[f64]) -> f64 {
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let all: Vec<f64> = a.iter().chain(b).copied().collect();
    let g = mean(&all);
    let ssb = a.len() as f64 * (mean(a) - g).powi(2) + b.len() as f64 * (mean(b) - g).powi(2);
    let ssw: f64 = a.iter().map(|x| (x - mean(a)).powi(2)).sum::<f64>()
        + b.iter().map(|x| (x - mean(b)).powi(2)).sum::<f64>();
    ssb / (ssw / (all.len() - 2) as f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn f_matches_hand_computation((a, b) in groups()) {
        let r = one_way_f_test(&[a.clone(), b.clone()], 200, 1).unwrap();
        let want = oracle_f(&a, &b);
        prop_assert!((r.f_statistic - want).abs() <= 1e-9 * want.max(1.0));
        prop_assert_eq!(r.df_between, 1);
        prop_assert_eq!(r.df_within, a.len() + b.len() - 2);
        prop_assert!((0.0..=1.0).contains(&r.p_value));
    }

    #[test]
    fn invariant_under_shift_and_positive_scale((a, b) in groups(), shift in -1e3..1e3f64, scale in 0.01..100.0f64, seed in any::<u64>()) {
        let base = one_way_f_test(&[a.clone(), b.clone()], 500, seed).unwrap();
        let t = |v: &[f64]| v.iter().map(|x| x * scale + shift).collect::<Vec<_>>();
        let moved = one_way_f_test(&[t(&a), t(&b)], 500, seed).unwrap();
        prop_assert!((base.f_statistic - moved.f_statistic).abs() <= 1e-6 * base.f_statistic.max(1.0));
        prop_assert!((base.p_value - moved.p_value).abs() <= 1e-12);
    }

    #[test]
    fn invariant_under_group_swap((a, b) in groups(), seed in any::<u64>()) {
        let ab = one_way_f_test(&[a.clone(), b.clone()], 500, seed).unwrap();
        let ba = one_way_f_test(&[b, a], 500, seed).unwrap();
        prop_assert!((ab.f_statistic - ba.f_statistic).abs() <= 1e-9 * ab.f_statistic.max(1.0));
        prop_assert_eq!(ab.p_value, ba.p_value);
    }
}

#[test]
fn textbook_example() {
    let r = one_way_f_test(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]], 10_000, 0).unwrap();
    assert_eq!(r.f_statistic, 13.5);
    let r = one_way_f_test(&[vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]], 10_000, 0).unwrap();
    assert_eq!(r.f_statistic, 0.0);
    assert!(r.p_value > 0.99);
}

#[test]
fn significance_table_layout() {
    let cfg = SynthConfig {
        n_per_class: 60,
        ..SynthConfig::with_seed(4)
    };
    let records: Vec<FeatureRecord> = generate_dataset(&cfg)
        .unwrap()
        .train
        .iter()
        .map(|t| FeatureRecord::from_trial(t).unwrap())
        .collect();
    let rows = significance_table(&records, 999, 1).unwrap();
    assert_eq!(rows.iter().map(|r| r.feature).collect::<Vec<_>>(), Feature::ALL.to_vec());
    for row in &rows {
        let pairs: Vec<TaskPair> = row.results.iter().map(|(p, _)| *p).collect();
        assert_eq!(pairs, TaskPair::ALL.to_vec());
    }
    // Axis subsets partition the full comparison.
    let [g, v] = task_groups(&records, Feature::Var, TaskPair::GraspVsView);
    let [gv, vv] = task_groups(&records, Feature::Var, TaskPair::VerticalGraspVsView);
    let [gh, vh] = task_groups(&records, Feature::Var, TaskPair::HorizontalGraspVsView);
    assert_eq!(g.len(), gv.len() + gh.len());
    assert_eq!(v.len(), vv.len() + vh.len());
    let csv = significance_csv(&rows);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("feature,vertical_grasp_vs_view_f,"));
    assert!(lines[1].starts_with("ADF2C,"));
    assert!(lines[4].starts_with("VAR,"));
}
