//! Independent reference implementations and fixtures shared by the
//! integration tests. Nothing here calls into the feature or detector code
//! under test.

#![allow(dead_code)]

use gaze_intent::{Fixation, GazeSample, ObjectContext, Point};
use rand::Rng;

/// Brute-force features written directly from their definitions.
pub struct OracleFeatures {
    pub adf2c: f64,
    pub adf2t: f64,
    pub adf2i: f64,
    pub var: f64,
}

fn euclid(ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    ((ax - bx) * (ax - bx) + (ay - by) * (ay - by)).sqrt()
}

pub fn oracle_features(fixations: &[(f64, f64)], ctx: &ObjectContext) -> OracleFeatures {
    let n = fixations.len() as f64;
    let mut to_c = 0.0;
    let mut to_t = 0.0;
    let mut to_i = 0.0;
    for &(x, y) in fixations {
        to_c += euclid(x, y, ctx.centroid.x, ctx.centroid.y);
        to_t += euclid(x, y, ctx.grasp_thumb.x, ctx.grasp_thumb.y);
        to_i += euclid(x, y, ctx.grasp_index.x, ctx.grasp_index.y);
    }
    let mut mx = 0.0;
    let mut my = 0.0;
    for &(x, y) in fixations {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    let d: Vec<f64> = fixations.iter().map(|&(x, y)| euclid(x, y, mx, my)).collect();
    let mut mean_d = 0.0;
    for v in &d {
        mean_d += v;
    }
    mean_d /= n;
    let mut var = 0.0;
    for v in &d {
        var += (v - mean_d) * (v - mean_d);
    }
    OracleFeatures {
        adf2c: to_c / n,
        adf2t: to_t / n,
        adf2i: to_i / n,
        var: var / n,
    }
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300) || a == b
}

pub fn random_context<R: Rng>(rng: &mut R) -> ObjectContext {
    let c = Point::new(rng.random_range(100.0..1200.0), rng.random_range(100.0..600.0));
    let dx = rng.random_range(-80.0..80.0);
    let dy = rng.random_range(-80.0..80.0);
    ObjectContext {
        centroid: c,
        grasp_thumb: Point::new(c.x - dx - 1.0, c.y - dy),
        grasp_index: Point::new(c.x + dx + 1.0, c.y + dy),
        shape_id: "random".into(),
    }
}

pub fn random_fixations<R: Rng>(rng: &mut R, n: usize) -> Vec<Fixation> {
    let mut t = 0.0;
    (0..n)
        .map(|_| {
            let d = rng.random_range(80.0..400.0);
            let f = Fixation {
                t_start_ms: t,
                duration_ms: d,
                x: rng.random_range(0.0..1280.0),
                y: rng.random_range(0.0..720.0),
            };
            t += d + 40.0;
            f
        })
        .collect()
}

/// A gaze stream alternating dwells and saccades, with coordinates on a
/// 1/8 px grid so translations by whole pixels are exact, and occasional
/// low-confidence samples.
pub fn random_stream<R: Rng>(rng: &mut R, n: usize) -> Vec<GazeSample> {
    let mut out = Vec::with_capacity(n);
    let mut t = 0.0;
    let mut cx = rng.random_range(100.0..1100.0);
    let mut cy = rng.random_range(100.0..600.0);
    let mut dwell_left = 0usize;
    let grid = |v: f64| (v * 8.0).round() / 8.0;
    while out.len() < n {
        if dwell_left == 0 {
            cx += rng.random_range(-150.0..150.0);
            cy += rng.random_range(-150.0..150.0);
            dwell_left = rng.random_range(1..60);
        }
        dwell_left -= 1;
        let jitter = if rng.random_bool(0.1) { 60.0 } else { 15.0 };
        let x = grid(cx + rng.random_range(-jitter..jitter));
        let y = grid(cy + rng.random_range(-jitter..jitter));
        let conf = if rng.random_bool(0.05) { 0.3 } else { 1.0 };
        out.push(GazeSample::new(t, x, y, conf));
        t += rng.random_range(4..=20) as f64;
    }
    out
}
