mod common;

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use avaplace_core::*;
use proptest::prelude::*;

fn angle() -> impl Strategy<Value = f64> {
    -PI..PI
}

fn obox() -> impl Strategy<Value = OrientedBox> {
    (-2.0..2.0f64, -2.0..2.0f64, angle(), 0.2..2.0f64, 0.2..2.0f64)
        .prop_map(|(x, y, t, w, d)| OrientedBox::new(Point::new(x, y), t, w, d))
}

/// Grid of points covering the closed box.
fn sample_points(b: &OrientedBox, n: usize) -> Vec<Point> {
    let [f, r] = b.axes();
    let mut pts = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let u = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
            let v = -1.0 + 2.0 * j as f64 / (n - 1) as f64;
            pts.push(b.center + (u * b.half_depth) * f + (v * b.half_width) * r);
        }
    }
    pts
}

/// Point-membership oracle: two rectangles overlap iff a sampled point of one
/// lies in the other.
fn sampled_overlap(a: &OrientedBox, b: &OrientedBox) -> bool {
    sample_points(a, 100).iter().any(|&p| b.contains(p)) || sample_points(b, 100).iter().any(|&p| a.contains(p))
}

fn grown(b: &OrientedBox, by: f64) -> OrientedBox {
    OrientedBox { half_width: b.half_width + by, half_depth: b.half_depth + by, ..*b }
}

proptest! {
    #[test]
    fn wrap_angle_range_and_congruence(a in -100.0..100.0f64) {
        let w = wrap_angle(a);
        prop_assert!(w > -PI && w <= PI);
        let k = (a - w) / TAU;
        prop_assert!((k - k.round()).abs() < 1e-9);
    }

    #[test]
    fn obb_intersection_is_symmetric(a in obox(), b in obox()) {
        prop_assert_eq!(obb_intersects(&a, &b), obb_intersects(&b, &a));
    }

    #[test]
    fn obb_intersection_matches_point_sampling(a in obox(), b in obox()) {
        // 100×100 samples on boxes up to 2 m leave ≤ 2 cm gaps; only assert
        // when the verdict is stable under growing/shrinking both boxes.
        let margin = 0.03;
        let inner = sampled_overlap(&grown(&a, -margin), &grown(&b, -margin));
        let outer = sampled_overlap(&grown(&a, margin), &grown(&b, margin));
        prop_assume!(inner == outer);
        prop_assert_eq!(obb_intersects(&a, &b), inner);
    }

    #[test]
    fn endpoints_rotate_with_the_frame(x in -3.0..3.0f64, y in -3.0..3.0f64, t in angle(), w in 0.1..3.0f64, rot in angle()) {
        let (r, l) = endpoints(Point::new(x, y), t, w);
        prop_assert!(((r - l).norm() - w).abs() < 1e-12);
        let (rr, rl) = endpoints(Point::new(x, y).rotated(rot), t + rot, w);
        prop_assert!((rr - r.rotated(rot)).norm() < 1e-9);
        prop_assert!((rl - l.rotated(rot)).norm() < 1e-9);
    }

    #[test]
    fn feature_is_rigidly_invariant(
        sx in -2.0..2.0f64, sy in -2.0..2.0f64, st in angle(),
        tx in -2.0..2.0f64, ty in -2.0..2.0f64, tt in angle(), tw in 0.3..2.0f64,
        rot in angle(), dx in -5.0..5.0f64, dy in -5.0..5.0f64,
    ) {
        prop_assume!(Point::new(sx, sy).distance(Point::new(tx, ty)) > 0.2);
        let target = SceneObject::new("t", ObjectKind::Screen, Point::new(tx, ty), tt, tw, 0.1, true).unwrap();
        let source = Placement::new(sx, sy, st);
        let f = interaction_feature(&source, 0.5, &target).unwrap();
        let m = RigidTransform { rotation: rot, translation: Point::new(dx, dy) };
        let moved_target = SceneObject { center: m.apply(target.center), theta: m.apply_angle(tt), ..target.clone() };
        let moved_source = Placement::at(m.apply(source.position()), st + rot);
        let g = interaction_feature(&moved_source, 0.5, &moved_target).unwrap();
        for (a, b) in f.phi.iter().zip(g.phi) {
            prop_assert!(a.abs() <= PI && *a > -PI);
            prop_assert!(wrap_angle(a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn mirrored_arrangement_negates_angles(d in 0.5..4.0f64, w in 0.2..3.0f64, sw in 0.2..1.0f64) {
        // Source on the x-axis facing +x, target on the x-axis facing back.
        let target = SceneObject::new("t", ObjectKind::Screen, Point::new(d, 0.0), PI, w, 0.1, true).unwrap();
        let f = interaction_feature(&Placement::new(0.0, 0.0, 0.0), sw, &target).unwrap();
        prop_assert!((f.phi[0] + f.phi[1]).abs() < 1e-12);
        prop_assert!((f.phi[2] + f.phi[3]).abs() < 1e-12);
    }

    #[test]
    fn similarity_symmetric_and_bounded(a in prop::collection::vec(angle(), 8), b in prop::collection::vec(angle(), 8)) {
        let fv = |v: &[f64]| FeatureVector {
            features: v.chunks(4).map(|c| InteractionFeature { phi: [c[0], c[1], c[2], c[3]] }).collect(),
            target_ids: vec![],
        };
        let (fa, fb) = (fv(&a), fv(&b));
        let s = similarity(&fa, &fb).unwrap();
        prop_assert!(s > 0.0 && s <= 1.0);
        prop_assert!((s - similarity(&fb, &fa).unwrap()).abs() <= 1e-12 * s);
    }

    #[test]
    fn overlay_transform_inverse_is_identity(
        lx in -3.0..3.0f64, ly in -3.0..3.0f64, lt in angle(),
        rx in -3.0..3.0f64, ry in -3.0..3.0f64, rt in angle(),
        px in -5.0..5.0f64, py in -5.0..5.0f64,
    ) {
        let mk = |x, y, t| SceneObject::new("s", ObjectKind::Screen, Point::new(x, y), t, 1.0, 0.1, true).unwrap();
        let (l, r) = (mk(lx, ly, lt), mk(rx, ry, rt));
        let t = overlay_transform(&l, &r);
        prop_assert!((t.apply(r.center) - l.center).norm() < 1e-12);
        prop_assert!(wrap_angle(t.apply_angle(r.theta) - l.theta).abs() < 1e-12);
        let p = Point::new(px, py);
        prop_assert!((t.inverse().apply(t.apply(p)) - p).norm() < 1e-12);
        let id = t.compose(&t.inverse());
        prop_assert!(id.rotation.abs() < 1e-12 && id.translation.norm() < 1e-12);
    }

    #[test]
    fn score_at_reproduces_samples_and_is_periodic(scores in prop::collection::vec(0.0..1.0f64, 8), o in angle(), k in -3i32..3) {
        let field: Vec<ScoredSample> = scores.iter().enumerate().map(|(i, &s)| ScoredSample {
            local: Placement::new(0.5, 0.5, i as f64 * FRAC_PI_4),
            ocp: None,
            score: s,
        }).collect();
        let p = Point::new(0.5, 0.5);
        for s in &field {
            prop_assert!((score_at(p, s.local.theta(), &field).unwrap() - s.score).abs() < 1e-12);
        }
        let a = score_at(p, o, &field).unwrap();
        let b = score_at(p, o + k as f64 * TAU, &field).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
        let (lo, hi) = scores.iter().fold((1.0f64, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
        prop_assert!(a >= lo - 1e-12 && a <= hi + 1e-12);
    }

    #[test]
    fn hue_is_monotone_above_threshold(a in 0.8..1.0f64, b in 0.8..1.0f64) {
        let cfg = GuidanceConfig::default();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(score_to_hue(lo, &cfg) <= score_to_hue(hi, &cfg));
        let (clo, chi) = (score_to_color(lo, &cfg).0, score_to_color(hi, &cfg).0);
        // moving yellow → green: red channel falls, green stays full
        prop_assert!(clo[0] >= chi[0]);
        prop_assert_eq!(clo[1], 255);
        prop_assert_eq!(chi[2], 0);
    }
}

#[test]
fn similarity_decays_with_single_component_difference() {
    let base = FeatureVector {
        features: vec![InteractionFeature { phi: [0.3, -0.2, 0.1, 0.0] }],
        target_ids: vec![],
    };
    let mut prev = 1.0;
    for i in 1..=100 {
        let d = PI * i as f64 / 100.0;
        let mut other = base.clone();
        other.features[0].phi[1] = wrap_angle(-0.2 + d);
        let s = similarity(&base, &other).unwrap();
        assert!(s < prev, "not decreasing at {d}");
        prev = s;
    }
}

#[test]
fn candidate_set_is_a_checked_subset() {
    let mut rng = common::rng(3);
    for _ in 0..5 {
        let (pair, ids) = common::random_pair(&mut rng, 4.0);
        let targets = TargetSet::resolve(&pair, &ids).unwrap();
        let grid = grid_samples(&pair.local, 0.33, FRAC_PI_4).unwrap();
        let c = candidate_set(&pair.local, targets.local(), &grid, &pair.body, VisibilityMode::Mutual);
        let again = candidate_set(&pair.local, targets.local(), &grid, &pair.body, VisibilityMode::Mutual);
        assert_eq!(c, again);
        let mut last = 0;
        for q in &c {
            let idx = grid.samples.iter().position(|s| s == q).expect("candidate not in grid");
            assert!(idx >= last, "order not stable");
            last = idx;
            assert!(is_feasible(q, &pair.local, &pair.body));
            assert!(visibility_ok(q, targets.local(), &pair.body, VisibilityMode::Mutual).unwrap());
            // any single feature angle must independently be within ±π/2
            for t in targets.local() {
                let f = interaction_feature(q, pair.body.shoulder_width, t).unwrap();
                assert!(f.phi.iter().all(|a| a.abs() < PI / 2.0));
            }
        }
        let source_only = candidate_set(&pair.local, targets.local(), &grid, &pair.body, VisibilityMode::SourceOnly);
        assert!(c.iter().all(|q| source_only.contains(q)));
    }
}

#[test]
fn identical_rooms_give_identical_candidate_counts() {
    let pair = common::identical_pair(4.0);
    let targets = TargetSet::resolve(&pair, &["tv"]).unwrap();
    let gl = grid_samples(&pair.local, 0.33, FRAC_PI_4).unwrap();
    let gr = grid_samples(&pair.remote, 0.33, FRAC_PI_4).unwrap();
    let a = candidate_set(&pair.local, targets.local(), &gl, &pair.body, VisibilityMode::Mutual);
    let b = candidate_set(&pair.remote, targets.remote(), &gr, &pair.body, VisibilityMode::Mutual);
    assert_eq!(a.len(), b.len());
}

#[test]
fn refinement_grows_samples_and_keeps_candidate_ratio() {
    let room = common::office(5.0);
    let tv = room.object("tv").unwrap().clone();
    let body = BodyParams::default();
    let mut prev_count = 0;
    let mut ratios = vec![];
    for step in [0.33, 0.25, 0.2, 0.165] {
        let g = grid_samples(&room, step, FRAC_PI_4).unwrap();
        assert!(g.samples.len() > prev_count);
        prev_count = g.samples.len();
        let c = candidate_set(&room, std::slice::from_ref(&tv), &g, &body, VisibilityMode::Mutual);
        ratios.push(c.len() as f64 / g.samples.len() as f64);
    }
    for r in &ratios {
        assert!((r - ratios[0]).abs() <= 0.1 * ratios[0], "{ratios:?}");
    }
}

proptest! {
    #[test]
    fn wrap_angle_is_idempotent(a in -100.0..100.0f64) {
        let w = wrap_angle(a);
        prop_assert_eq!(wrap_angle(w).to_bits(), w.to_bits());
    }
}
