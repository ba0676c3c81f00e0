use fragsolve::fragments::{Pose2D, Solution2D};
use fragsolve::geometry::{
    discrete_curvature, douglas_peucker_indices, point_segment_distance, raster_intersection_area, Bitmask, Point2,
    Polyline, RigidTransform2,
};
use fragsolve::metrics::{evaluate_2d, MetricsConfig};
use fragsolve::puzzle_gen::{crossing_cuts, erode_mask, scramble, GenConfig};
use fragsolve::solver_genetic::{fitness, Chromosome, GeneticConfig};
use image::{Rgba, RgbaImage};
use proptest::prelude::*;

fn image(w: u32, h: u32) -> RgbaImage {
    RgbaImage::from_fn(w, h, |x, y| Rgba([x as u8, y as u8, (x * y) as u8, 255]))
}

fn blob() -> impl Strategy<Value = Bitmask> {
    (4usize..40, 4usize..40, any::<u64>()).prop_map(|(w, h, seed)| {
        let (cx, cy) = (w as f64 / 2.0, h as f64 / 2.0);
        let wobble = (seed % 7) as f64 / 10.0;
        let m = Bitmask::from_fn(w, h, |x, y| {
            let (dx, dy) = ((x as f64 + 0.5 - cx) / cx, (y as f64 + 0.5 - cy) / cy);
            dx * dx + dy * dy <= 1.0 + wobble * (dx * 3.0).sin()
        });
        if m.is_empty() {
            Bitmask::from_fn(w, h, |_, _| true)
        } else {
            m
        }
    })
}

fn pose() -> impl Strategy<Value = RigidTransform2> {
    (-180.0..180.0f64, -30.0..30.0f64, -30.0..30.0f64).prop_map(|(t, x, y)| RigidTransform2::new(t, x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn erosion_is_monotone_in_depth(m in blob(), d1 in 0.0..6.0f64, d2 in 0.0..6.0f64) {
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let shallow = erode_mask(&m, |_, _| lo);
        let deep = erode_mask(&m, |_, _| hi);
        for (x, y) in deep.iter_ones() {
            prop_assert!(shallow.get(x, y));
            prop_assert!(m.get(x, y));
        }
    }

    #[test]
    fn intersection_is_symmetric_and_bounded(a in blob(), b in blob(), pa in pose(), pb in pose()) {
        let ab = raster_intersection_area(&a, &pa, &b, &pb, 1.0, None).unwrap().area;
        let ba = raster_intersection_area(&b, &pb, &a, &pa, 1.0, None).unwrap().area;
        prop_assert_eq!(ab, ba);
        let self_a = raster_intersection_area(&a, &pa, &a, &pa, 1.0, None).unwrap().area;
        let self_b = raster_intersection_area(&b, &pb, &b, &pb, 1.0, None).unwrap().area;
        prop_assert!(ab <= self_a.min(self_b));
    }

    #[test]
    fn simplification_bounds(pts in prop::collection::vec((-50.0..50.0f64, -50.0..50.0f64), 2..60), eps in 0.0..5.0f64) {
        let mut pts: Vec<Point2> = pts.into_iter().map(|(x, y)| Point2::new(x, y)).collect();
        pts.dedup_by(|a, b| a.distance(*b) < 1e-9);
        prop_assume!(pts.len() >= 2);
        let line = Polyline::open(pts.clone()).unwrap();
        let keep = douglas_peucker_indices(&line, eps).unwrap();
        prop_assert!(keep.len() <= pts.len());
        for w in keep.windows(2) {
            for i in w[0] + 1..w[1] {
                prop_assert!(point_segment_distance(pts[i], pts[w[0]], pts[w[1]]) <= eps + 1e-9);
            }
        }
    }

    #[test]
    fn curvature_flips_under_mirror(pts in prop::collection::vec((-50.0..50.0f64, -50.0..50.0f64), 3..30)) {
        let pts: Vec<Point2> = pts.into_iter().map(|(x, y)| Point2::new(x, y)).collect();
        prop_assume!(pts.windows(2).all(|w| w[0].distance(w[1]) > 1e-3));
        prop_assume!(pts[0].distance(*pts.last().unwrap()) > 1e-3);
        let mirrored: Vec<Point2> = pts.iter().map(|p| Point2::new(-p.x, p.y)).collect();
        let k = discrete_curvature(&Polyline::closed(pts).unwrap());
        let km = discrete_curvature(&Polyline::closed(mirrored).unwrap());
        for (a, b) in k.iter().zip(&km) {
            prop_assert!((a + b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn ground_truth_minimises_fitness(seed in 0u64..1000, cuts in 1usize..5, scramble_seed in any::<u64>()) {
        let p = crossing_cuts(&image(96, 80), &GenConfig { n_cuts: cuts, seed, ..Default::default() }).unwrap();
        let cfg = GeneticConfig::default();
        let gt = Chromosome::from_solution(p.ground_truth.as_ref().unwrap(), &p).unwrap();
        let other = Chromosome::from_solution(&scramble(&p, scramble_seed), &p).unwrap();
        prop_assert!(fitness(&gt, &p, &cfg) <= fitness(&other, &p, &cfg));
    }

    #[test]
    fn metrics_stay_in_range(seed in 0u64..1000, sigma in 0.0..40.0f64, motion in pose()) {
        let p = crossing_cuts(&image(120, 96), &GenConfig { n_cuts: 3, seed, ..Default::default() }).unwrap();
        let gt = p.ground_truth.as_ref().unwrap();
        let noisy = Solution2D::from_poses(gt.poses.iter().enumerate().map(|(k, (id, q))| {
            let j = (k as f64 * 1.7).sin() * sigma;
            (id.clone(), Pose2D::new(q.x + j, q.y - j, q.theta_deg + j))
        }));
        let moved = Solution2D::from_poses(noisy.poses.iter().map(|(id, q)| {
            (id.clone(), Pose2D::from_transform(&motion.compose(&q.to_transform())))
        }));
        let cfg = MetricsConfig::default();
        let a = evaluate_2d(&noisy, &p, &cfg).unwrap();
        let b = evaluate_2d(&moved, &p, &cfg).unwrap();
        for r in [&a, &b] {
            prop_assert!((0.0..=1.0).contains(&r.q_pos));
            prop_assert!((0.0..=1.0).contains(&r.f1));
            prop_assert!(r.rmse_translation >= 0.0 && r.rmse_rotation >= 0.0);
        }
        prop_assert!((a.q_pos - b.q_pos).abs() <= 0.02);
        prop_assert!((a.rmse_translation - b.rmse_translation).abs() <= 1e-6);
        prop_assert!((a.f1 - b.f1).abs() <= 1e-9);
    }

    #[test]
    fn crossing_cuts_partition_the_image(seed in 0u64..1000, cuts in 1usize..7) {
        let p = crossing_cuts(&image(100, 90), &GenConfig { n_cuts: cuts, seed, ..Default::default() }).unwrap();
        let total: u64 = p.fragments.iter().map(|f| f.area_px()).sum();
        prop_assert_eq!(total, 100 * 90);
        let gt = p.ground_truth.as_ref().unwrap();
        for (i, a) in p.fragments.iter().enumerate() {
            for b in &p.fragments[i + 1..] {
                let area = raster_intersection_area(
                    a.mask(), &gt.get(a.id()).unwrap().to_transform(),
                    b.mask(), &gt.get(b.id()).unwrap().to_transform(), 1.0, None,
                ).unwrap().area;
                prop_assert_eq!(area, 0.0);
            }
        }
    }
}
