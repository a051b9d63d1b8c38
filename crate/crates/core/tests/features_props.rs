mod common;

use gaze_intent::features::{self, FeatureCombination};
use gaze_intent::{Fixation, ObjectContext, Point};
use proptest::prelude::*;

use common::{oracle_features, rel_close};

fn coord() -> impl Strategy<Value = f64> {
    -2000.0..2000.0f64
}

fn point() -> impl Strategy<Value = Point> {
    (coord(), coord()).prop_map(|(x, y)| Point::new(x, y))
}

fn fixations() -> impl Strategy<Value = Vec<Fixation>> {
    prop::collection::vec((coord(), coord()), 1..40).prop_map(|pts| {
        pts.into_iter()
            .enumerate()
            .map(|(i, (x, y))| Fixation {
                t_start_ms: i as f64 * 300.0,
                duration_ms: 200.0,
                x,
                y,
            })
            .collect()
    })
}

fn context() -> impl Strategy<Value = ObjectContext> {
    (point(), point(), point())
        .prop_filter("distinct grasp points", |(_, t, i)| t != i)
        .prop_map(|(c, t, i)| ObjectContext {
            centroid: c,
            grasp_thumb: t,
            grasp_index: i,
            shape_id: "prop".into(),
        })
}

fn map_all(fx: &[Fixation], ctx: &ObjectContext, f: impl Fn(Point) -> Point) -> (Vec<Fixation>, ObjectContext) {
    let moved = fx
        .iter()
        .map(|x| {
            let p = f(x.position());
            Fixation { x: p.x, y: p.y, ..*x }
        })
        .collect();
    let ctx = ObjectContext {
        centroid: f(ctx.centroid),
        grasp_thumb: f(ctx.grasp_thumb),
        grasp_index: f(ctx.grasp_index),
        shape_id: ctx.shape_id.clone(),
    };
    (moved, ctx)
}

/// Relative closeness with an absolute floor tied to the coordinate scale,
/// since VAR can be zero and distances can cancel.
fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(scale)
}

proptest! {
    #[test]
    fn matches_brute_force(fx in fixations(), ctx in context()) {
        let got = features::compute(&fx, &ctx).unwrap();
        let pts: Vec<(f64, f64)> = fx.iter().map(|f| (f.x, f.y)).collect();
        let want = oracle_features(&pts, &ctx);
        prop_assert!(rel_close(got.adf2c, want.adf2c, 1e-9));
        prop_assert!(rel_close(got.adf2t, want.adf2t, 1e-9));
        prop_assert!(rel_close(got.adf2i, want.adf2i, 1e-9));
        prop_assert!(close(got.var, want.var, 1e-3));
        prop_assert_eq!(got.n_fix, fx.len());
    }

    #[test]
    fn invariant_under_translation(fx in fixations(), ctx in context(), dx in coord(), dy in coord()) {
        let a = features::compute(&fx, &ctx).unwrap();
        let (fx2, ctx2) = map_all(&fx, &ctx, |p| Point::new(p.x + dx, p.y + dy));
        let b = features::compute(&fx2, &ctx2).unwrap();
        // Translation perturbs coordinates by rounding at the 4000 px scale.
        prop_assert!((a.adf2c - b.adf2c).abs() <= 1e-9 * 4000.0);
        prop_assert!((a.adf2i - b.adf2i).abs() <= 1e-9 * 4000.0);
        prop_assert!((a.adf2t - b.adf2t).abs() <= 1e-9 * 4000.0);
        prop_assert!((a.var - b.var).abs() <= 1e-6);
    }

    #[test]
    fn invariant_under_rotation(fx in fixations(), ctx in context(), theta in 0.0..std::f64::consts::TAU) {
        let a = features::compute(&fx, &ctx).unwrap();
        let (s, c) = theta.sin_cos();
        let (fx2, ctx2) = map_all(&fx, &ctx, |p| Point::new(c * p.x - s * p.y, s * p.x + c * p.y));
        let b = features::compute(&fx2, &ctx2).unwrap();
        prop_assert!((a.adf2c - b.adf2c).abs() <= 1e-9 * 4000.0);
        prop_assert!((a.adf2i - b.adf2i).abs() <= 1e-9 * 4000.0);
        prop_assert!((a.adf2t - b.adf2t).abs() <= 1e-9 * 4000.0);
        prop_assert!((a.var - b.var).abs() <= 1e-6);
    }

    #[test]
    fn distances_scale_linearly_and_var_quadratically(fx in fixations(), ctx in context(), k in 0.1..10.0f64) {
        let a = features::compute(&fx, &ctx).unwrap();
        let (fx2, ctx2) = map_all(&fx, &ctx, |p| Point::new(p.x * k, p.y * k));
        let b = features::compute(&fx2, &ctx2).unwrap();
        prop_assert!(rel_close(b.adf2c, k * a.adf2c, 1e-9));
        prop_assert!(rel_close(b.adf2i, k * a.adf2i, 1e-9));
        prop_assert!(rel_close(b.adf2t, k * a.adf2t, 1e-9));
        prop_assert!(close(b.var, k * k * a.var, k * k * 1e-3));
    }

    #[test]
    fn invariant_under_fixation_order(fx in fixations(), ctx in context(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let a = features::compute(&fx, &ctx).unwrap();
        let mut shuffled = fx.clone();
        shuffled.shuffle(&mut gaze_intent::rng::derive(seed, 0));
        let b = features::compute(&shuffled, &ctx).unwrap();
        prop_assert!(rel_close(a.adf2c, b.adf2c, 1e-12));
        prop_assert!(rel_close(a.adf2i, b.adf2i, 1e-12));
        prop_assert!(close(a.var, b.var, 1e-3));
    }

    #[test]
    fn projection_follows_canonical_order(fx in fixations(), ctx in context()) {
        let fv = features::compute(&fx, &ctx).unwrap();
        prop_assert_eq!(fv.project(FeatureCombination::C1), vec![fv.adf2t, fv.var]);
        prop_assert_eq!(fv.project(FeatureCombination::C2), vec![fv.adf2i, fv.var]);
        prop_assert_eq!(fv.project(FeatureCombination::C3), vec![fv.adf2c, fv.adf2t, fv.var]);
        prop_assert_eq!(fv.project(FeatureCombination::C4), vec![fv.adf2c, fv.adf2i, fv.var]);
        prop_assert_eq!(fv.project(FeatureCombination::C5), vec![fv.adf2c, fv.adf2i, fv.adf2t, fv.var]);
    }
}

#[test]
fn empty_fixations_are_insufficient() {
    let ctx = ObjectContext {
        centroid: Point::new(0.0, 0.0),
        grasp_thumb: Point::new(-1.0, 0.0),
        grasp_index: Point::new(1.0, 0.0),
        shape_id: "x".into(),
    };
    assert!(matches!(
        features::compute(&[], &ctx),
        Err(gaze_intent::Error::InsufficientData(_))
    ));
}
