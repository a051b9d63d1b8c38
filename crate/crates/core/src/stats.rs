//! Between-task significance testing with a one-way F statistic.
//!
//! p-values come from label permutation rather than the F distribution. When
//! the number of distinct group assignments is no larger than the requested
//! permutation count, every assignment is enumerated and the p-value is exact.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::features::{Feature, FeatureRecord};
use crate::gaze::{GraspAxis, TaskLabel};
use crate::rng::{derive, subseed};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FTestResult {
    /// `f64::INFINITY` when groups are internally constant but differ.
    pub f_statistic: f64,
    pub p_value: f64,
    pub df_between: usize,
    pub df_within: usize,
    /// Permutations drawn, or assignments enumerated when `exact`.
    pub n_permutations: usize,
    pub exact: bool,
}

/// F = (SSB / (g - 1)) / (SSW / (N - g)) for values split by `sizes`.
fn f_statistic(values: &[f64], sizes: &[usize]) -> f64 {
    let n = values.len() as f64;
    let grand = values.iter().sum::<f64>() / n;
    let mut ssb = 0.0;
    let mut ssw = 0.0;
    let mut start = 0;
    for &len in sizes {
        let g = &values[start..start + len];
        let mean = g.iter().sum::<f64>() / len as f64;
        ssb += len as f64 * (mean - grand).powi(2);
        ssw += g.iter().map(|x| (x - mean).powi(2)).sum::<f64>();
        start += len;
    }
    let sst = ssb + ssw;
    if sst == 0.0 {
        return 0.0;
    }
    if ssw <= 1e-12 * sst {
        return f64::INFINITY;
    }
    let df1 = (sizes.len() - 1) as f64;
    let df2 = n - sizes.len() as f64;
    (ssb / df1) / (ssw / df2)
}

/// Distinct group assignments of the pooled values, if at most `limit`.
fn assignment_count(sizes: &[usize], limit: usize) -> Option<usize> {
    let mut total: u128 = 1;
    let mut placed: u128 = 0;
    for &len in sizes {
        for i in 1..=len as u128 {
            placed += 1;
            total = total * placed / i;
            if total > limit as u128 * placed.max(1) {
                // Later factors never shrink the count below its current value.
                return None;
            }
        }
    }
    (total <= limit as u128).then_some(total as usize)
}

fn enumerate_assignments(
    pooled: &[f64],
    sizes: &[usize],
    remaining: &mut [usize],
    slot: usize,
    groups: &mut [Vec<f64>],
    visit: &mut dyn FnMut(&[Vec<f64>]),
) {
    if slot == pooled.len() {
        visit(groups);
        return;
    }
    for g in 0..sizes.len() {
        if remaining[g] == 0 {
            continue;
        }
        remaining[g] -= 1;
        groups[g].push(pooled[slot]);
        enumerate_assignments(pooled, sizes, remaining, slot + 1, groups, visit);
        groups[g].pop();
        remaining[g] += 1;
    }
}

fn at_least(f: f64, observed: f64) -> bool {
    if observed.is_infinite() {
        f.is_infinite()
    } else {
        f >= observed * (1.0 - 1e-12)
    }
}

pub fn one_way_f_test(groups: &[Vec<f64>], n_permutations: usize, seed: u64) -> Result<FTestResult> {
    if groups.len() < 2 {
        return Err(Error::InvalidInput("at least two groups are required".into()));
    }
    if let Some((i, g)) = groups.iter().enumerate().find(|(_, g)| g.len() < 2) {
        return Err(Error::InsufficientData(format!(
            "group {i} has {} values, at least 2 are required",
            g.len()
        )));
    }
    if groups.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("values must be finite".into()));
    }
    if n_permutations == 0 {
        return Err(Error::InvalidConfig("n_permutations must be positive".into()));
    }

    let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
    let pooled: Vec<f64> = groups.iter().flatten().copied().collect();
    let observed = f_statistic(&pooled, &sizes);
    let df_between = groups.len() - 1;
    let df_within = pooled.len() - groups.len();

    // The null distribution depends only on the pooled multiset and the group
    // sizes, so canonical orders make p independent of how groups are listed.
    let mut pooled = pooled;
    pooled.sort_by(f64::total_cmp);
    let mut sizes = sizes;
    sizes.sort_unstable();

    if let Some(total) = assignment_count(&sizes, n_permutations) {
        let mut hits = 0usize;
        let mut remaining = sizes.clone();
        let mut scratch: Vec<Vec<f64>> = sizes.iter().map(|&n| Vec::with_capacity(n)).collect();
        let mut flat = Vec::with_capacity(pooled.len());
        enumerate_assignments(&pooled, &sizes, &mut remaining, 0, &mut scratch, &mut |gs| {
            flat.clear();
            gs.iter().for_each(|g| flat.extend_from_slice(g));
            if at_least(f_statistic(&flat, &sizes), observed) {
                hits += 1;
            }
        });
        return Ok(FTestResult {
            f_statistic: observed,
            p_value: hits as f64 / total as f64,
            df_between,
            df_within,
            n_permutations: total,
            exact: true,
        });
    }

    use rand::seq::SliceRandom;
    let hits: usize = (0..n_permutations)
        .into_par_iter()
        .map_init(
            || pooled.clone(),
            |buf, i| {
                buf.copy_from_slice(&pooled);
                buf.shuffle(&mut derive(seed, i as u64));
                usize::from(at_least(f_statistic(buf, &sizes), observed))
            },
        )
        .sum();
    Ok(FTestResult {
        f_statistic: observed,
        p_value: (hits + 1) as f64 / (n_permutations + 1) as f64,
        df_between,
        df_within,
        n_permutations,
        exact: false,
    })
}

/// Which trials a comparison uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskPair {
    VerticalGraspVsView,
    HorizontalGraspVsView,
    GraspVsView,
}

impl TaskPair {
    pub const ALL: [TaskPair; 3] = [
        TaskPair::VerticalGraspVsView,
        TaskPair::HorizontalGraspVsView,
        TaskPair::GraspVsView,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TaskPair::VerticalGraspVsView => "vertical_grasp_vs_view",
            TaskPair::HorizontalGraspVsView => "horizontal_grasp_vs_view",
            TaskPair::GraspVsView => "grasp_vs_view",
        }
    }

    fn admits(self, axis: GraspAxis) -> bool {
        match self {
            TaskPair::VerticalGraspVsView => axis == GraspAxis::Vertical,
            TaskPair::HorizontalGraspVsView => axis == GraspAxis::Horizontal,
            TaskPair::GraspVsView => true,
        }
    }
}

/// GRASP and VIEW values of `feature` among records admitted by `pair`.
pub fn task_groups(records: &[FeatureRecord], feature: Feature, pair: TaskPair) -> [Vec<f64>; 2] {
    let mut grasp = Vec::new();
    let mut view = Vec::new();
    for r in records.iter().filter(|r| pair.admits(r.grasp_axis)) {
        let v = r.features().get(feature);
        match r.task_label {
            TaskLabel::Grasp => grasp.push(v),
            TaskLabel::View => view.push(v),
            TaskLabel::Unlabeled => {}
        }
    }
    [grasp, view]
}

#[derive(Debug, Clone, Serialize)]
pub struct SignificanceRow {
    pub feature: Feature,
    pub results: Vec<(TaskPair, FTestResult)>,
}

/// Feature rows by task-pair columns.
pub fn significance_table(
    records: &[FeatureRecord],
    n_permutations: usize,
    seed: u64,
) -> Result<Vec<SignificanceRow>> {
    Feature::ALL
        .iter()
        .enumerate()
        .map(|(fi, &feature)| {
            let results = TaskPair::ALL
                .iter()
                .enumerate()
                .map(|(pi, &pair)| {
                    let groups = task_groups(records, feature, pair);
                    let key = (fi * TaskPair::ALL.len() + pi) as u64;
                    Ok((pair, one_way_f_test(&groups, n_permutations, subseed(seed, key))?))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SignificanceRow { feature, results })
        })
        .collect()
}

fn fmt_f(f: f64) -> String {
    if f.is_infinite() {
        "inf".into()
    } else {
        format!("{f:.6}")
    }
}

pub fn significance_csv(rows: &[SignificanceRow]) -> String {
    let mut out = String::from("feature");
    for pair in TaskPair::ALL {
        let p = pair.name();
        out.push_str(&format!(",{p}_f,{p}_p,{p}_df_between,{p}_df_within"));
    }
    out.push('\n');
    for row in rows {
        out.push_str(row.feature.name());
        for (_, r) in &row.results {
            out.push_str(&format!(
                ",{},{:.6},{},{}",
                fmt_f(r.f_statistic),
                r.p_value,
                r.df_between,
                r.df_within
            ));
        }
        out.push('\n');
    }
    out
}
