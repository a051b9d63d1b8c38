//! Calibrated synthetic trials.
//!
//! GRASP fixations form a tight isotropic Gaussian cloud on the index-finger
//! grasp point. VIEW fixations form a wide cloud on the object centroid. Cloud
//! widths are chosen so the expected per-trial VAR equals the configured
//! targets, and the grasp points are placed so that ADF2C carries no class
//! information: both its mean and its between-trial spread match across tasks.

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal as NormalDist};

use crate::error::{Error, Result};
use crate::gaze::{Fixation, GazeSample, GraspAxis, ObjectContext, Point, TaskLabel, Trial};
use crate::rng::{derive, subseed};

/// Var(d) / sigma^2 for the distance d of an isotropic 2D Gaussian point to its
/// center (Rayleigh distribution): 2 - pi/2.
pub const RAYLEIGH_VAR_FACTOR: f64 = 2.0 - std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Shape {
    #[serde(rename = "square")]
    Square,
    #[serde(rename = "cross")]
    Cross,
    #[serde(rename = "T-up")]
    TUp,
    #[serde(rename = "T-down")]
    TDown,
    #[serde(rename = "T-left")]
    TLeft,
    #[serde(rename = "T-right")]
    TRight,
    #[serde(rename = "triangle")]
    Triangle,
    #[serde(rename = "bar-h")]
    BarH,
    #[serde(rename = "bar-v")]
    BarV,
}

impl Shape {
    pub const TRAINING: [Shape; 6] = [
        Shape::Square,
        Shape::Cross,
        Shape::TUp,
        Shape::TDown,
        Shape::TLeft,
        Shape::TRight,
    ];
    pub const TEST: [Shape; 3] = [Shape::Triangle, Shape::BarH, Shape::BarV];

    pub fn id(self) -> &'static str {
        match self {
            Shape::Square => "square",
            Shape::Cross => "cross",
            Shape::TUp => "T-up",
            Shape::TDown => "T-down",
            Shape::TLeft => "T-left",
            Shape::TRight => "T-right",
            Shape::Triangle => "triangle",
            Shape::BarH => "bar-h",
            Shape::BarV => "bar-v",
        }
    }

    /// Grasp directions the shape is presented with. Stems of vertical T
    /// shapes and bars are gripped across their narrow side.
    pub fn grasp_axes(self) -> &'static [GraspAxis] {
        use GraspAxis::*;
        match self {
            Shape::Square | Shape::Cross => &[Horizontal, Vertical],
            Shape::TUp | Shape::TDown | Shape::BarH => &[Vertical],
            Shape::TLeft | Shape::TRight | Shape::Triangle | Shape::BarV => &[Horizontal],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GraspAnchor {
    IndexPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_per_class: usize,
    /// Held-out trials per class drawn from `test_shapes`.
    pub n_test_per_class: usize,
    pub grasp_count_mean: f64,
    pub grasp_count_std: f64,
    pub view_count_mean: f64,
    pub view_count_std: f64,
    pub target_var_grasp: f64,
    pub target_var_view: f64,
    pub grasp_anchor: GraspAnchor,
    pub seed: u64,
    pub training_shapes: Vec<Shape>,
    pub test_shapes: Vec<Shape>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_per_class: 320,
            n_test_per_class: 30,
            grasp_count_mean: 8.18,
            grasp_count_std: 0.99,
            view_count_mean: 8.62,
            view_count_std: 0.76,
            target_var_grasp: 29.85,
            target_var_view: 256.67,
            grasp_anchor: GraspAnchor::IndexPoint,
            seed: 0,
            training_shapes: Shape::TRAINING.to_vec(),
            test_shapes: Shape::TEST.to_vec(),
        }
    }
}

impl SynthConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_per_class == 0 {
            return Err(Error::InvalidConfig("n_per_class must be at least 1".into()));
        }
        for (name, v) in [
            ("grasp_count_std", self.grasp_count_std),
            ("view_count_std", self.view_count_std),
            ("target_var_grasp", self.target_var_grasp),
            ("target_var_view", self.target_var_view),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be >= 0, got {v}")));
            }
        }
        for (name, v) in [
            ("grasp_count_mean", self.grasp_count_mean),
            ("view_count_mean", self.view_count_mean),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.training_shapes.is_empty() {
            return Err(Error::InvalidConfig("no training shapes".into()));
        }
        if self.n_test_per_class > 0 && self.test_shapes.is_empty() {
            return Err(Error::InvalidConfig("no test shapes".into()));
        }
        if let Some(s) = self.test_shapes.iter().find(|s| self.training_shapes.contains(s)) {
            return Err(Error::InvalidConfig(format!(
                "shape {} is in both training and test sets",
                s.id()
            )));
        }
        Ok(())
    }
}

/// Per-axis standard deviation whose isotropic Gaussian gives `target_var` as
/// the variance of point-to-center distances.
pub fn calibrate_sigma(target_var: f64) -> Result<f64> {
    if !(target_var.is_finite() && target_var >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "target variance must be >= 0, got {target_var}"
        )));
    }
    Ok((target_var / RAYLEIGH_VAR_FACTOR).sqrt())
}

/// E[VAR] / sigma^2 for `n` fixations drawn from an isotropic Gaussian with
/// per-axis std sigma, where VAR is measured against the sample mean position.
/// Monte-Carlo estimates (4e6 draws each) for n = 3..=40.
const FINITE_VAR_FACTOR: [f64; 38] = [
    0.14651,
    0.21663,
    0.25898,
    0.28710,
    0.30722,
    0.32249,
    0.33429,
    0.34377,
    0.35146,
    0.35800,
    0.36340,
    0.36809,
    0.37207,
    0.37568,
    0.37883,
    0.38169,
    0.38412,
    0.38636,
    0.38834,
    0.39038,
    0.39211,
    0.39352,
    0.39488,
    0.39627,
    0.39744,
    0.39863,
    0.39969,
    0.40060,
    0.40150,
    0.40242,
    0.40320,
    0.40402,
    0.40475,
    0.40531,
    0.40602,
    0.40665,
    0.40721,
    0.40773,
];

/// Expected VAR per unit sigma^2 for a trial with `n` fixations.
///
/// Two points are always equidistant from their midpoint, so n <= 2 gives 0.
/// Past the table the factor approaches [`RAYLEIGH_VAR_FACTOR`] like
/// `((n - 1) / n)^2`.
pub fn finite_var_factor(n: usize) -> f64 {
    match n {
        0..=2 => 0.0,
        3..=40 => FINITE_VAR_FACTOR[n - 3],
        _ => {
            let r = (n as f64 - 1.0) / n as f64;
            RAYLEIGH_VAR_FACTOR * r * r
        }
    }
}

/// Cloud width giving expected per-trial VAR `target_var` at `n` fixations.
pub fn sigma_for_count(target_var: f64, n: usize) -> Result<f64> {
    if n <= 2 {
        return calibrate_sigma(target_var);
    }
    calibrate_sigma(target_var)?;
    Ok((target_var / finite_var_factor(n)).sqrt())
}

/// Distribution of max(2, round(N(mean, std))) as `(count, probability)` pairs.
fn count_pmf(mean: f64, std: f64) -> Vec<(usize, f64)> {
    if std == 0.0 {
        return vec![((mean.round() as usize).max(2), 1.0)];
    }
    let dist = NormalDist::new(mean, std).expect("validated parameters");
    let hi = (mean + 10.0 * std).ceil().max(3.0) as usize;
    let mut pmf: Vec<(usize, f64)> = (2..=hi)
        .map(|n| {
            let upper = dist.cdf(n as f64 + 0.5);
            let lower = if n == 2 { 0.0 } else { dist.cdf(n as f64 - 0.5) };
            (n, upper - lower)
        })
        .collect();
    let total: f64 = pmf.iter().map(|(_, p)| p).sum();
    for (_, p) in &mut pmf {
        *p /= total;
    }
    pmf
}

/// exp(-x) I0(x) and exp(-x) I1(x) for x >= 0.
fn scaled_bessel_i01(x: f64) -> (f64, f64) {
    if x < 20.0 {
        bessel_series(x)
    } else {
        bessel_hankel(x)
    }
}

fn bessel_series(x: f64) -> (f64, f64) {
    let h = x / 2.0;
    let (mut t0, mut t1) = (1.0, h);
    let (mut s0, mut s1) = (t0, t1);
    let mut k = 1.0;
    while t0 > 1e-17 * s0 || t1 > 1e-17 * s1.max(f64::MIN_POSITIVE) {
        t0 *= h * h / (k * k);
        t1 *= h * h / (k * (k + 1.0));
        s0 += t0;
        s1 += t1;
        k += 1.0;
        if k > 500.0 {
            break;
        }
    }
    let e = (-x).exp();
    (s0 * e, s1 * e)
}

/// Hankel asymptotic expansion.
fn bessel_hankel(x: f64) -> (f64, f64) {
    let base = 1.0 / (2.0 * std::f64::consts::PI * x).sqrt();
    let series = |mu: f64| {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..12 {
            let kf = k as f64;
            term *= -(mu - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
            sum += term;
        }
        sum
    };
    (base * series(0.0), base * series(4.0))
}

/// E|X| for X ~ N(offset, sigma^2 I) in 2D, with |offset| = `offset`.
pub fn rice_mean(offset: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return offset.abs();
    }
    let q = offset * offset / (2.0 * sigma * sigma);
    let (i0, i1) = scaled_bessel_i01(q / 2.0);
    sigma * (std::f64::consts::PI / 2.0).sqrt() * ((1.0 + q) * i0 + q * i1)
}

// Probabilists' Gauss-Hermite rule, 5 nodes.
const GH_NODES: [f64; 5] = [
    -2.856_970_013_872_806,
    -1.355_626_179_974_266,
    0.0,
    1.355_626_179_974_266,
    2.856_970_013_872_806,
];
const GH_WEIGHTS: [f64; 5] = [
    0.011_257_411_327_721,
    0.222_075_922_005_613,
    0.533_333_333_333_333,
    0.222_075_922_005_613,
    0.011_257_411_327_721,
];

const MIN_ANCHOR_PX: f64 = 1.0;

/// Generator parameters derived from a [`SynthConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// Mean distance from centroid to each grasp point.
    pub grasp_offset_mean: f64,
    /// Per-trial standard deviation of that distance.
    pub grasp_offset_jitter: f64,
    /// Expected ADF2C of a VIEW trial, which GRASP trials are matched to.
    pub adf2c_target: f64,
}

impl Calibration {
    pub fn from_config(config: &SynthConfig) -> Result<Self> {
        config.validate()?;
        let grasp_pmf = count_pmf(config.grasp_count_mean, config.grasp_count_std);
        let view_pmf = count_pmf(config.view_count_mean, config.view_count_std);
        let root_half_pi = (std::f64::consts::PI / 2.0).sqrt();

        let mut view_mean = 0.0;
        let mut view_second = 0.0;
        for &(n, p) in &view_pmf {
            let s = sigma_for_count(config.target_var_view, n)?;
            let m = s * root_half_pi;
            view_mean += p * m;
            view_second += p * (RAYLEIGH_VAR_FACTOR * s * s / n as f64 + m * m);
        }
        let view_var = view_second - view_mean * view_mean;

        let grasp_sigmas: Vec<(f64, f64)> = grasp_pmf
            .iter()
            .map(|&(n, p)| Ok((p, sigma_for_count(config.target_var_grasp, n)?)))
            .collect::<Result<_>>()?;
        let grasp_moments = |offset: f64, jitter: f64| {
            let mut mean = 0.0;
            let mut second = 0.0;
            let counts = grasp_pmf.iter().map(|&(n, _)| n as f64);
            for (&(p, s), n) in grasp_sigmas.iter().zip(counts) {
                for (z, w) in GH_NODES.iter().zip(GH_WEIGHTS) {
                    let nu = (offset + jitter * z).max(MIN_ANCHOR_PX);
                    let m = rice_mean(nu, s);
                    let var_one = 2.0 * s * s + nu * nu - m * m;
                    mean += p * w * m;
                    second += p * w * (var_one / n + m * m);
                }
            }
            (mean, second - mean * mean)
        };

        let solve = |jitter: f64| {
            solve_increasing(|nu| grasp_moments(nu, jitter).0, view_mean, 0.0, 10.0 * view_mean + 100.0)
        };
        let mut jitter = 0.0;
        for _ in 0..4 {
            let (_, var_no_jitter) = grasp_moments(solve(jitter), 0.0);
            jitter = (view_var - var_no_jitter).max(0.0).sqrt();
        }
        let offset = solve(jitter);

        Ok(Self {
            grasp_offset_mean: offset.max(MIN_ANCHOR_PX),
            grasp_offset_jitter: jitter,
            adf2c_target: view_mean,
        })
    }
}

fn solve_increasing(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    if f(lo) >= target {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Scene placement: objects sit near the middle of a 1280x720 frame.
const SCENE_CENTER: Point = Point::new(640.0, 360.0);
const SCENE_JITTER: (f64, f64) = (80.0, 60.0);

#[derive(Debug, Clone)]
pub struct Generator {
    config: SynthConfig,
    calibration: Calibration,
}

impl Generator {
    pub fn new(config: SynthConfig) -> Result<Self> {
        let calibration = Calibration::from_config(&config)?;
        Ok(Self {
            config,
            calibration,
        })
    }

    pub fn config(&self) -> &SynthConfig {
        &self.config
    }

    pub fn calibration(&self) -> &Calibration {
        &self.calibration
    }

    fn draw_count<R: Rng + ?Sized>(&self, task: TaskLabel, rng: &mut R) -> usize {
        let (mean, std) = match task {
            TaskLabel::Grasp => (self.config.grasp_count_mean, self.config.grasp_count_std),
            _ => (self.config.view_count_mean, self.config.view_count_std),
        };
        let draw = if std > 0.0 {
            Normal::new(mean, std).expect("validated").sample(rng)
        } else {
            mean
        };
        draw.round().max(2.0) as usize
    }

    /// Object context for `shape`: centroid near the scene middle, grasp
    /// points on opposing edges along the grasp axis.
    pub fn draw_context<R: Rng + ?Sized>(&self, shape: Shape, rng: &mut R) -> ObjectContext {
        let axes = shape.grasp_axes();
        let axis = axes[rng.random_range(0..axes.len())];
        let centroid = Point::new(
            SCENE_CENTER.x + rng.random_range(-SCENE_JITTER.0..=SCENE_JITTER.0),
            SCENE_CENTER.y + rng.random_range(-SCENE_JITTER.1..=SCENE_JITTER.1),
        );
        let z: f64 = StandardNormal.sample(rng);
        let offset = (self.calibration.grasp_offset_mean + self.calibration.grasp_offset_jitter * z)
            .max(MIN_ANCHOR_PX);
        // Image y grows downward: index finger on the right or on top.
        let (ux, uy) = match axis {
            GraspAxis::Horizontal => (1.0, 0.0),
            GraspAxis::Vertical => (0.0, -1.0),
        };
        ObjectContext {
            centroid,
            grasp_index: Point::new(centroid.x + offset * ux, centroid.y + offset * uy),
            grasp_thumb: Point::new(centroid.x - offset * ux, centroid.y - offset * uy),
            shape_id: shape.id().to_string(),
        }
    }

    pub fn generate_trial<R: Rng + ?Sized>(
        &self,
        task: TaskLabel,
        shape: Shape,
        rng: &mut R,
    ) -> Result<Trial> {
        let (anchor_target, center_of) = match task {
            TaskLabel::Grasp => (self.config.target_var_grasp, true),
            TaskLabel::View => (self.config.target_var_view, false),
            TaskLabel::Unlabeled => {
                return Err(Error::InvalidInput("cannot synthesize an unlabeled trial".into()))
            }
        };
        let n = self.draw_count(task, rng);
        let object = self.draw_context(shape, rng);
        let center = match (center_of, self.config.grasp_anchor) {
            (true, GraspAnchor::IndexPoint) => object.grasp_index,
            (false, _) => object.centroid,
        };
        let sigma = sigma_for_count(anchor_target, n)?;

        let mut fixations = Vec::with_capacity(n);
        let mut t = 0.0;
        for _ in 0..n {
            let zx: f64 = StandardNormal.sample(rng);
            let zy: f64 = StandardNormal.sample(rng);
            let duration = rng.random_range(80.0..=400.0);
            fixations.push(Fixation {
                t_start_ms: t,
                duration_ms: duration,
                x: center.x + sigma * zx,
                y: center.y + sigma * zy,
            });
            t += duration + rng.random_range(30.0..=80.0);
        }
        Ok(Trial {
            trial_id: String::new(),
            participant_id: String::new(),
            task_label: task,
            fixations,
            object,
        })
    }

    /// Trial `index` of a set: even indices GRASP, odd VIEW, shapes cycled.
    fn indexed_trial(&self, set: &str, seed: u64, shapes: &[Shape], index: usize) -> Result<Trial> {
        let task = if index.is_multiple_of(2) {
            TaskLabel::Grasp
        } else {
            TaskLabel::View
        };
        let shape = shapes[(index / 2) % shapes.len()];
        let mut rng = derive(seed, index as u64);
        let mut trial = self.generate_trial(task, shape, &mut rng)?;
        trial.trial_id = format!("{set}-{index:05}");
        trial.participant_id = format!("synth-p{}", (index / 2) % 8);
        Ok(trial)
    }

    pub fn generate_dataset(&self) -> Result<SynthDataset> {
        let train = (0..2 * self.config.n_per_class)
            .map(|i| self.indexed_trial("train", self.config.seed, &self.config.training_shapes, i))
            .collect::<Result<Vec<_>>>()?;
        let test_seed = subseed(self.config.seed, 1);
        let test = (0..2 * self.config.n_test_per_class)
            .map(|i| self.indexed_trial("test", test_seed, &self.config.test_shapes, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(SynthDataset {
            train,
            test,
            manifest: SynthManifest {
                config: self.config.clone(),
                calibration: self.calibration,
            },
        })
    }
}

/// Provenance record stored next to a generated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthManifest {
    pub config: SynthConfig,
    pub calibration: Calibration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthDataset {
    /// Trials on the training shapes.
    pub train: Vec<Trial>,
    /// Trials on the held-out shapes.
    pub test: Vec<Trial>,
    pub manifest: SynthManifest,
}

pub fn generate_dataset(config: &SynthConfig) -> Result<SynthDataset> {
    Generator::new(config.clone())?.generate_dataset()
}

/// Samples `fixations` on a uniform clock at `rate_hz`, holding each fixation's
/// position and interpolating linearly across the saccade gaps between them.
pub fn rasterize(fixations: &[Fixation], rate_hz: f64) -> Vec<GazeSample> {
    let (Some(first), Some(last)) = (fixations.first(), fixations.last()) else {
        return Vec::new();
    };
    let step = 1000.0 / rate_hz;
    let t0 = first.t_start_ms;
    let end = last.end_ms();
    let mut out = Vec::new();
    let mut cur = 0;
    let mut k = 0u64;
    loop {
        let t = t0 + k as f64 * step;
        if t > end {
            break;
        }
        while cur + 1 < fixations.len() && t >= fixations[cur + 1].t_start_ms {
            cur += 1;
        }
        let f = &fixations[cur];
        let (x, y) = if t <= f.end_ms() || cur + 1 == fixations.len() {
            (f.x, f.y)
        } else {
            let next = &fixations[cur + 1];
            let a = (t - f.end_ms()) / (next.t_start_ms - f.end_ms());
            (f.x + a * (next.x - f.x), f.y + a * (next.y - f.y))
        };
        out.push(GazeSample::new(t, x, y, 1.0));
        k += 1;
    }
    out
}

/// Repeats a trial's fixation sequence back to back (with `gap_ms` between
/// repetitions) until it covers `total_ms`, then rasterizes the result.
pub fn rasterize_for(trial: &Trial, rate_hz: f64, total_ms: f64, gap_ms: f64) -> Vec<GazeSample> {
    let Some(first) = trial.fixations.first() else {
        return Vec::new();
    };
    let base = first.t_start_ms;
    let period = trial.fixations.last().map(|l| l.end_ms()).unwrap_or(base) - base + gap_ms;
    let mut repeated = Vec::new();
    let mut offset = 0.0;
    'outer: loop {
        for f in &trial.fixations {
            let start = f.t_start_ms - base + offset;
            if start >= total_ms {
                break 'outer;
            }
            repeated.push(Fixation {
                t_start_ms: start,
                duration_ms: f.duration_ms.min(total_ms - start),
                ..*f
            });
        }
        offset += period;
    }
    rasterize(&repeated, rate_hz)
}
