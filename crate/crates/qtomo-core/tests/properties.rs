//! Randomized invariants across the library: optimality and equivariance
//! of quantiles, stability of directional projections, certificates from
//! the halfplane kernel, and metric behavior of the region tools.

use core::f64::consts::TAU;
use proptest::prelude::*;
use qtomo_core::envelope::{build_envelope, DirectionSet};
use qtomo_core::estimators::EmpiricalEstimator;
use qtomo_core::geom::{
    hausdorff_distance, intersect_halfplanes, kappa, ConvexRegion, Halfplane, Point2,
    RegionKind, UnitDirection,
};
use qtomo_core::quantile::{
    check_loss, directional_quantile, quantile, quantile_set, QuantileVersion,
};

fn values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0..100.0f64, 1..50)
}

fn points(range: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Point2>> {
    prop::collection::vec((-50.0..50.0f64, -50.0..50.0f64), range)
        .prop_map(|v| v.into_iter().map(|(x, y)| Point2::new(x, y)).collect())
}

/// Bounded polygon regions that always contain the origin: a big box plus
/// extra constraints whose offsets stay strictly negative.
fn regions() -> impl Strategy<Value = ConvexRegion> {
    (
        prop::collection::vec((0.0..TAU, -25.0..-1.0f64), 0..10),
        3usize..24,
    )
        .prop_map(|(extra, m)| {
            let mut hs: Vec<Halfplane> = (0..m)
                .map(|k| {
                    Halfplane::new(
                        UnitDirection::from_angle(TAU * k as f64 / m as f64),
                        -30.0,
                    )
                })
                .collect();
            for (a, q) in extra {
                hs.push(Halfplane::new(UnitDirection::from_angle(a), q));
            }
            intersect_halfplanes(&hs).unwrap()
        })
        .prop_filter("polygon regions only", |r| r.kind() == RegionKind::Polygon)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn quantile_minimizes_check_loss(xs in values(), p in 0.01..0.99f64) {
        let q = quantile(&xs, p, QuantileVersion::InfType1).unwrap();
        let base = check_loss(&xs, q, p).unwrap();
        // The loss is piecewise linear with knees at the data, so probing
        // the data plus one point beyond each end certifies optimality.
        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for c in xs.iter().cloned().chain([lo - 1.0, hi + 1.0]) {
            let l = check_loss(&xs, c, p).unwrap();
            prop_assert!(base <= l + 1e-9 * (1.0 + l.abs()));
        }
    }

    #[test]
    fn quantiles_are_affine_equivariant(
        xs in values(),
        p in 0.01..0.99f64,
        a in 0.1..5.0f64,
        b in -10.0..10.0f64,
    ) {
        let mapped: Vec<f64> = xs.iter().map(|&x| a * x + b).collect();
        let q1 = quantile(&xs, p, QuantileVersion::InfType1).unwrap();
        let q2 = quantile(&mapped, p, QuantileVersion::InfType1).unwrap();
        prop_assert_eq!(q2, a * q1 + b);
        let r1 = quantile(&xs, p, QuantileVersion::InterpolatedR7).unwrap();
        let r2 = quantile(&mapped, p, QuantileVersion::InterpolatedR7).unwrap();
        prop_assert!((r2 - (a * r1 + b)).abs() <= 1e-9 * (1.0 + r2.abs()));
    }

    #[test]
    fn quantiles_grow_with_p(
        xs in values(),
        p1 in 0.01..0.99f64,
        p2 in 0.01..0.99f64,
    ) {
        let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
        for version in [QuantileVersion::InfType1, QuantileVersion::InterpolatedR7] {
            let a = quantile(&xs, lo, version).unwrap();
            let b = quantile(&xs, hi, version).unwrap();
            prop_assert!(a <= b + 1e-12, "{version:?}: q({lo}) = {a} > q({hi}) = {b}");
        }
    }

    #[test]
    fn directional_quantiles_are_lipschitz_in_direction(
        pts in points(1..40),
        p in 0.01..0.99f64,
        a1 in 0.0..TAU,
        a2 in 0.0..TAU,
    ) {
        let s = UnitDirection::from_angle(a1);
        let t = UnitDirection::from_angle(a2);
        let qs = directional_quantile(&pts, s, p, QuantileVersion::InfType1).unwrap();
        let qt = directional_quantile(&pts, t, p, QuantileVersion::InfType1).unwrap();
        let reach = pts.iter().map(|q| q.norm()).fold(0.0, f64::max);
        let gap = (s.as_point() - t.as_point()).norm();
        prop_assert!((qs - qt).abs() <= reach * gap + 1e-9 * (1.0 + reach));
    }

    #[test]
    fn quantile_sets_flip_under_negation(xs in values(), p in 0.01..0.99f64) {
        // Keep clear of the razor edge where the two sides could disagree
        // about p n being an integer; the exact k/n grid is covered below.
        let t = p * xs.len() as f64;
        prop_assume!((t - t.round()).abs() > 1e-6);
        let neg: Vec<f64> = xs.iter().map(|&x| -x).collect();
        let a = quantile_set(&neg, p).unwrap();
        let b = quantile_set(&xs, 1.0 - p).unwrap();
        prop_assert_eq!(a.lo, -b.hi);
        prop_assert_eq!(a.hi, -b.lo);
    }

    #[test]
    fn quantile_sets_flip_on_the_exact_grid(xs in values()) {
        let n = xs.len();
        let neg: Vec<f64> = xs.iter().map(|&x| -x).collect();
        for k in 1..n {
            let p = k as f64 / n as f64;
            let a = quantile_set(&neg, p).unwrap();
            let b = quantile_set(&xs, 1.0 - p).unwrap();
            prop_assert_eq!(a.lo, -b.hi);
            prop_assert_eq!(a.hi, -b.lo);
        }
    }

    #[test]
    fn active_halfplanes_reproduce_the_region(
        pts in points(5..40),
        p in 0.02..0.5f64,
        m in 5usize..24,
    ) {
        let ds = DirectionSet::uniform(m).unwrap();
        let est = EmpiricalEstimator::new(QuantileVersion::InfType1);
        let env = build_envelope(&pts, p, &ds, &est).unwrap();
        let sub: Vec<Halfplane> = env.active().iter().map(|&i| env.halfplanes[i]).collect();
        prop_assert!(!sub.is_empty());
        let again = intersect_halfplanes(&sub).unwrap();
        if env.region.is_empty() {
            prop_assert!(again.is_empty(), "witness family must be infeasible");
        } else {
            prop_assert_eq!(again.kind(), env.region.kind());
            prop_assert!(hausdorff_distance(&again, &env.region).unwrap() < 1e-8);
        }
    }

    #[test]
    fn extra_halfplanes_only_shrink_the_region(
        extra in prop::collection::vec((0.0..TAU, -20.0..20.0f64), 2..12),
        keep in 0usize..6,
    ) {
        let mut base: Vec<Halfplane> = (0..4)
            .map(|k| {
                Halfplane::new(
                    UnitDirection::from_angle(TAU * k as f64 / 4.0),
                    -40.0,
                )
            })
            .collect();
        for &(a, q) in extra.iter().take(keep.min(extra.len())) {
            base.push(Halfplane::new(UnitDirection::from_angle(a), q));
        }
        let sub = intersect_halfplanes(&base).unwrap();
        for &(a, q) in extra.iter().skip(keep.min(extra.len())) {
            base.push(Halfplane::new(UnitDirection::from_angle(a), q));
        }
        let full = intersect_halfplanes(&base).unwrap();
        if sub.is_empty() {
            prop_assert!(full.is_empty());
        } else {
            for &v in full.vertices() {
                prop_assert!(sub.contains(v, 1e-7));
            }
        }
    }

    #[test]
    fn hausdorff_behaves_like_a_metric(a in regions(), b in regions(), c in regions()) {
        prop_assert!(hausdorff_distance(&a, &a).unwrap() <= 1e-12);
        let ab = hausdorff_distance(&a, &b).unwrap();
        let ba = hausdorff_distance(&b, &a).unwrap();
        prop_assert_eq!(ab, ba);
        let bc = hausdorff_distance(&b, &c).unwrap();
        let ac = hausdorff_distance(&a, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-9);
        prop_assert!(ab >= 0.0);
    }

    #[test]
    fn kappa_never_drops_below_one(r in regions()) {
        prop_assert!(kappa(&r).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn support_is_sublinear(r in regions(), a1 in 0.0..TAU, a2 in 0.0..TAU) {
        let u = UnitDirection::from_angle(a1);
        let v = UnitDirection::from_angle(a2);
        let hu = r.support(u).unwrap();
        let hv = r.support(v).unwrap();
        for &x in r.vertices() {
            prop_assert!(u.dot(x) <= hu + 1e-12);
        }
        prop_assert!(hu + r.support(u.opposite()).unwrap() >= -1e-12);
        let w = u.as_point() + v.as_point();
        prop_assume!(w.norm() > 1e-6);
        let wd = UnitDirection::from_vector(w.x, w.y).unwrap();
        let hw = r.support(wd).unwrap();
        prop_assert!(hw * w.norm() <= hu + hv + 1e-9);
    }
}
