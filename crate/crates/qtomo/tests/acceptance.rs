//! Acceptance suite: one test per criterion, each printing a single
//! `criterion NN <label>: PASS|FAIL` line (visible with `--nocapture`).
//! Oracles here are deliberately independent re-derivations: direction
//! enumeration by hand, rank selection by hand, masses by integer counting.

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use qtomo::runner::quantile_table_parallel;
use qtomo_core::depth::{deepest_region, halfspace_depth};
use qtomo_core::envelope::{
    biplot_curve, build_envelope, conditional_envelope, empirical_envelopes,
    empirical_quantile_table, DirectionSet, Envelope,
};
use qtomo_core::estimators::{
    fit_gpd_tail, linear_qr, EmpiricalEstimator, ExtremeEstimator,
};
use qtomo_core::geom::{
    hausdorff_distance, intersect_halfplanes, kappa, polyline_self_intersects, Affine2,
    ConvexRegion, Halfplane, Point2, RegionKind, UnitDirection,
};
use qtomo_core::normalfit::{
    fit_normal, indexing_radius, normal_cdf, normal_contour, IndexingMode,
};
use qtomo_core::quantile::QuantileVersion;

/// Prints the verdict line even when the test body panics.
struct Criterion {
    label: &'static str,
    passed: bool,
}

impl Criterion {
    fn start(label: &'static str) -> Self {
        Criterion {
            label,
            passed: false,
        }
    }

    fn pass(mut self) {
        self.passed = true;
    }
}

impl Drop for Criterion {
    fn drop(&mut self) {
        println!(
            "{}: {}",
            self.label,
            if self.passed { "PASS" } else { "FAIL" }
        );
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn inf_estimator() -> EmpiricalEstimator {
    EmpiricalEstimator::new(QuantileVersion::InfType1)
}

/// Shared sample set for criteria 1 and 3: random sizes, random anisotropy.
fn small_samples() -> Vec<Vec<Point2>> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    (0..100)
        .map(|_| {
            let n = rng.random_range(5..=40usize);
            let sx = rng.random_range(0.5..3.0);
            let sy = rng.random_range(0.5..3.0);
            let shear = rng.random_range(-1.0..1.0);
            (0..n)
                .map(|_| {
                    let z1 = normal(&mut rng);
                    let z2 = normal(&mut rng);
                    Point2::new(sx * z1, shear * z1 + sy * z2)
                })
                .collect()
        })
        .collect()
}

/// Depth region oracle: every pair normal in both orientations plus the
/// axes, k-th smallest projection selected by hand, then one intersection.
fn oracle_depth_region(pts: &[Point2], k: usize) -> ConvexRegion {
    let mut dirs = vec![
        UnitDirection::from_vector(1.0, 0.0).unwrap(),
        UnitDirection::from_vector(-1.0, 0.0).unwrap(),
        UnitDirection::from_vector(0.0, 1.0).unwrap(),
        UnitDirection::from_vector(0.0, -1.0).unwrap(),
    ];
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let d = pts[j] - pts[i];
            if d.norm() == 0.0 {
                continue;
            }
            let s = UnitDirection::from_vector(-d.y, d.x).unwrap();
            dirs.push(s);
            dirs.push(s.opposite());
        }
    }
    let hs: Vec<Halfplane> = dirs
        .into_iter()
        .map(|s| {
            let mut proj: Vec<f64> = pts.iter().map(|&x| s.dot(x)).collect();
            let q = *proj.select_nth_unstable_by(k - 1, f64::total_cmp).1;
            Halfplane::new(s, q)
        })
        .collect();
    intersect_halfplanes(&hs).unwrap()
}

#[test]
fn a01_depth_region_equivalence() {
    let verdict = Criterion::start("criterion 01 depth-region equivalence");
    let clock = Instant::now();
    let est = inf_estimator();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for pts in &small_samples() {
        let n = pts.len();
        let dirs = DirectionSet::critical(pts).unwrap();
        let mut regions: Vec<(usize, ConvexRegion)> = Vec::new();
        for k in 1..=n / 2 {
            let p = k as f64 / n as f64;
            let env = build_envelope(pts, p, &dirs, &est).unwrap();
            let oracle = oracle_depth_region(pts, k);
            match (env.region.is_empty(), oracle.is_empty()) {
                (true, true) => {}
                (false, false) => {
                    let h = hausdorff_distance(&env.region, &oracle).unwrap();
                    assert!(h <= 1e-9, "k={k} n={n}: regions differ by {h}");
                }
                (a, b) => panic!("k={k} n={n}: envelope empty={a}, oracle empty={b}"),
            }
            regions.push((k, env.region));
        }
        let (mut lo, mut hi) = (pts[0], pts[0]);
        for &q in pts {
            lo = Point2::new(lo.x.min(q.x), lo.y.min(q.y));
            hi = Point2::new(hi.x.max(q.x), hi.y.max(q.y));
        }
        let span = Point2::new((hi.x - lo.x).max(1.0), (hi.y - lo.y).max(1.0));
        for _ in 0..1000 {
            let probe = Point2::new(
                rng.random_range(lo.x - 0.3 * span.x..hi.x + 0.3 * span.x),
                rng.random_range(lo.y - 0.3 * span.y..hi.y + 0.3 * span.y),
            );
            let depth = halfspace_depth(pts, probe).unwrap();
            for (k, region) in &regions {
                let wide = region.contains(probe, 1e-6);
                if wide != region.contains(probe, -1e-6) {
                    // Probe fell in the boundary band; membership there is
                    // a rounding call, not a verdict on correctness.
                    continue;
                }
                assert_eq!(
                    wide,
                    depth.count >= *k,
                    "probe {probe:?} at k={k}: depth count {}",
                    depth.count
                );
            }
        }
    }
    assert!(clock.elapsed() < Duration::from_secs(60), "over time budget");
    verdict.pass();
}

#[test]
fn a02_centerpoint_nonemptiness() {
    let verdict = Criterion::start("criterion 02 centerpoint nonemptiness");
    let est = inf_estimator();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut nonempty = 0;
    for _ in 0..500 {
        let n = rng.random_range(3..=60usize);
        let sx = rng.random_range(0.2..4.0);
        let sy = rng.random_range(0.2..4.0);
        let pts: Vec<Point2> = (0..n)
            .map(|_| Point2::new(sx * normal(&mut rng), sy * normal(&mut rng)))
            .collect();
        let k = n / 3;
        let p = k as f64 / n as f64;
        let dirs = DirectionSet::critical(&pts).unwrap();
        let env = build_envelope(&pts, p, &dirs, &est).unwrap();
        if !env.region.is_empty() {
            nonempty += 1;
        }
    }
    assert_eq!(nonempty, 500, "some floor(n/3)/n envelope came back empty");
    verdict.pass();
}

/// Most data points lying on one line through the sample, i and j included.
fn max_collinear(pts: &[Point2]) -> usize {
    let n = pts.len();
    let mut best = n.min(2);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = pts[j] - pts[i];
            if d.norm() == 0.0 {
                continue;
            }
            let on = pts.iter().filter(|&&q| (q - pts[i]).cross(d) == 0.0).count();
            best = best.max(on);
        }
    }
    best
}

#[test]
fn a03_tangent_mass_sandwich() {
    let verdict = Criterion::start("criterion 03 tangent-mass sandwich");
    let est = inf_estimator();
    for pts in &small_samples() {
        let n = pts.len();
        let delta = max_collinear(pts);
        let dirs = DirectionSet::critical(pts).unwrap();
        for k in 1..=n / 2 {
            let p = k as f64 / n as f64;
            let env = build_envelope(pts, p, &dirs, &est).unwrap();
            if env.region.is_empty() {
                continue;
            }
            let verts = env.region.vertices();
            for &a in env.active() {
                let h = &env.halfplanes[a];
                let below = pts.iter().filter(|&&x| h.s.dot(x) <= h.q).count();
                assert!(
                    k <= below && below <= 2 * k + delta,
                    "k={k} n={n}: tangent holds {below} points"
                );
                let scale = 1.0f64.max(h.q.abs());
                let touching = verts
                    .iter()
                    .filter(|&&v| (h.s.dot(v) - h.q).abs() <= 1e-9 * scale)
                    .count();
                if touching >= 2 {
                    assert!(
                        below <= k + delta,
                        "k={k} n={n}: edge tangent holds {below} points"
                    );
                }
            }
            // At a corner every direction in the normal cone supports the
            // region, and the sandwich must hold for those tangents too.
            if env.region.kind() != RegionKind::Polygon {
                continue;
            }
            let m = verts.len();
            for i in 0..m {
                let prev = verts[(i + m - 1) % m];
                let cur = verts[i];
                let next = verts[(i + 1) % m];
                let e0 = cur - prev;
                let e1 = next - cur;
                let n0 = UnitDirection::from_vector(e0.y, -e0.x).unwrap();
                let n1 = UnitDirection::from_vector(e1.y, -e1.x).unwrap();
                let a0 = n0.angle();
                let mut gap = n1.angle() - a0;
                if gap < 0.0 {
                    gap += TAU;
                }
                for t in [0.21, 0.48, 0.77] {
                    let nu = UnitDirection::from_angle(a0 + t * gap);
                    let cut = nu.dot(cur);
                    let tol = 1e-9 * 1.0f64.max(cut.abs());
                    // nu points outward, so the away-facing tangent
                    // halfspace is the one above the cut.
                    let above = pts.iter().filter(|&&x| nu.dot(x) >= cut - tol).count();
                    assert!(
                        k <= above && above <= 2 * k + delta,
                        "k={k} n={n}: corner tangent holds {above} points"
                    );
                }
            }
        }
    }
    verdict.pass();
}

#[test]
fn a04_affine_equivariance() {
    let verdict = Criterion::start("criterion 04 affine equivariance");
    let est = inf_estimator();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let dirs = DirectionSet::uniform(60).unwrap();
    for _ in 0..200 {
        let pts: Vec<Point2> = (0..150)
            .map(|_| Point2::new(normal(&mut rng), normal(&mut rng)))
            .collect();
        let th1 = rng.random_range(0.0..TAU);
        let th2 = rng.random_range(0.0..TAU);
        let s1 = rng.random_range(0.3..3.0);
        let s2 = s1 / rng.random_range(1.0..100.0);
        let (c1, z1) = (th1.cos(), th1.sin());
        let (c2, z2) = (th2.cos(), th2.sin());
        let m = [
            [c1 * s1 * c2 - z1 * s2 * z2, -c1 * s1 * z2 - z1 * s2 * c2],
            [z1 * s1 * c2 + c1 * s2 * z2, -z1 * s1 * z2 + c1 * s2 * c2],
        ];
        let shift = Point2::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let aff = Affine2::new(m, shift);

        let env = build_envelope(&pts, 0.2, &dirs, &est).unwrap();
        let mapped_pts: Vec<Point2> = pts.iter().map(|&x| aff.apply(x)).collect();
        let mapped_dirs = DirectionSet::from_directions(
            dirs.dirs()
                .iter()
                .map(|&s| aff.normal_pushforward(s).unwrap())
                .collect(),
        )
        .unwrap();
        let env_mapped = build_envelope(&mapped_pts, 0.2, &mapped_dirs, &est).unwrap();

        let pushed = ConvexRegion::polygon(
            env.region.vertices().iter().map(|&v| aff.apply(v)).collect(),
        )
        .unwrap();
        let h = hausdorff_distance(&env_mapped.region, &pushed).unwrap();
        let diam = pushed.diameter().unwrap();
        assert!(h <= 1e-9 * diam, "mismatch {h} at diameter {diam}");
    }
    verdict.pass();
}

#[test]
fn a05_kappa_error_bound() {
    let verdict = Criterion::start("criterion 05 kappa error bound");
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for trial in 0..200 {
        let eps = if trial % 2 == 0 { 1e-3 } else { 1e-2 };
        let pts: Vec<Point2> = (0..200)
            .map(|_| Point2::new(3.0 * normal(&mut rng), 3.0 * normal(&mut rng)))
            .collect();
        let m = rng.random_range(24..=60usize);
        let dirs = DirectionSet::uniform(m).unwrap();
        let q = empirical_quantile_table(&pts, dirs.dirs(), &[0.25], QuantileVersion::InfType1)
            .unwrap()
            .remove(0);
        let base = Envelope::from_directional_quantiles(0.25, &dirs, &q).unwrap();
        let bumped: Vec<f64> = q
            .iter()
            .map(|&v| v + rng.random_range(-eps..=eps))
            .collect();
        let pert = Envelope::from_directional_quantiles(0.25, &dirs, &bumped).unwrap();

        let h = hausdorff_distance(&pert.region, &base.region).unwrap();
        let worst = kappa(&pert.region)
            .unwrap()
            .max(kappa(&base.region).unwrap());
        assert!(
            h <= worst * eps + 1e-9,
            "moved {h} under eps {eps} with kappa {worst}"
        );
    }
    verdict.pass();
}

#[test]
fn a06_direction_count_convergence() {
    let verdict = Criterion::start("criterion 06 direction-count convergence");
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let pts: Vec<Point2> = (0..10_000)
        .map(|_| {
            let z1 = normal(&mut rng);
            let z2 = normal(&mut rng);
            Point2::new(2.0 * z1, 0.8 * z1 + 1.2 * z2)
        })
        .collect();
    let counts = [25usize, 50, 100, 200, 400, 1009];
    let regions: Vec<ConvexRegion> = counts
        .iter()
        .map(|&n| {
            let dirs = DirectionSet::uniform(n).unwrap();
            empirical_envelopes(&pts, &[0.1], &dirs, QuantileVersion::InfType1)
                .unwrap()
                .remove(0)
                .region
        })
        .collect();
    let reference = regions.last().unwrap();
    let diam = reference.diameter().unwrap();
    let gaps: Vec<f64> = regions
        .iter()
        .map(|r| hausdorff_distance(r, reference).unwrap())
        .collect();
    assert!(
        gaps[2] <= 0.01 * diam,
        "100 directions off by {} of diameter {diam}",
        gaps[2]
    );
    for w in gaps.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "refinement went backwards: {gaps:?}");
    }
    verdict.pass();
}

#[test]
fn a07_normal_baseline() {
    let verdict = Criterion::start("criterion 07 normal baseline");
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mean = Point2::new(1.0, -2.0);
    let chol = [[2.0, 0.0], [0.6, 1.28]];
    let pts: Vec<Point2> = (0..100_000)
        .map(|_| {
            let z1 = normal(&mut rng);
            let z2 = normal(&mut rng);
            Point2::new(
                mean.x + chol[0][0] * z1,
                mean.y + chol[1][0] * z1 + chol[1][1] * z2,
            )
        })
        .collect();

    let dirs = DirectionSet::uniform(512).unwrap();
    let env = empirical_envelopes(&pts, &[0.1], &dirs, QuantileVersion::InfType1)
        .unwrap()
        .remove(0);
    let r = indexing_radius(IndexingMode::TangentMass(0.1)).unwrap();
    let ring: Vec<Point2> = (0..4096)
        .map(|j| {
            let a = TAU * j as f64 / 4096.0;
            let (ux, uy) = (a.cos(), a.sin());
            Point2::new(
                mean.x + r * chol[0][0] * ux,
                mean.y + r * (chol[1][0] * ux + chol[1][1] * uy),
            )
        })
        .collect();
    let truth = ConvexRegion::polygon(ring).unwrap();
    let h = hausdorff_distance(&env.region, &truth).unwrap();
    let diam = truth.diameter().unwrap();
    assert!(h <= 0.02 * diam, "sample contour off by {h} of {diam}");

    let fit = fit_normal(&pts).unwrap();
    let contour = normal_contour(&fit, IndexingMode::TangentMass(0.1), 64).unwrap();
    let cov = fit.cov;
    let det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
    for &v in contour.vertices() {
        let w = v - fit.mean;
        // Outward normal of the ellipse at v solves cov * nu = v - mean.
        let nx = (cov[1][1] * w.x - cov[0][1] * w.y) / det;
        let ny = (cov[0][0] * w.y - cov[1][0] * w.x) / det;
        let len = (nx * nx + ny * ny).sqrt();
        let (ux, uy) = (nx / len, ny / len);
        let q = ux * v.x + uy * v.y;
        let center = ux * fit.mean.x + uy * fit.mean.y;
        let sd = (ux * (cov[0][0] * ux + cov[0][1] * uy)
            + uy * (cov[1][0] * ux + cov[1][1] * uy))
            .sqrt();
        let mass = 1.0 - normal_cdf((q - center) / sd);
        assert!(
            (mass - 0.1).abs() <= 1e-6,
            "tangent mass {mass} at vertex {v:?}"
        );
    }
    verdict.pass();
}

#[test]
fn a08_indexing_radii() {
    let verdict = Criterion::start("criterion 08 indexing radii");
    let enclosed = indexing_radius(IndexingMode::EnclosedMass(0.8)).unwrap();
    assert!(
        (enclosed - 1.7941225779941015).abs() <= 1e-5,
        "enclosed-mass radius {enclosed}"
    );
    let tangent = indexing_radius(IndexingMode::TangentMass(0.1)).unwrap();
    assert!((tangent - 1.281552).abs() <= 1e-6, "tangent radius {tangent}");
    let (mut lo, mut hi) = (0.0f64, 10.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid) < 0.9 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let bisected = 0.5 * (lo + hi);
    assert!(
        (tangent - bisected).abs() <= 1e-9,
        "quantile {tangent} vs bisection {bisected}"
    );
    verdict.pass();
}

#[test]
fn a09_extreme_tail() {
    let verdict = Criterion::start("criterion 09 extreme tail");
    let mut close = 0;
    for rep in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(900 + rep);
        let neg: Vec<f64> = (0..10_000)
            .map(|_| (1.0 - rng.random::<f64>()).ln())
            .collect();
        let model = fit_gpd_tail(&neg, 0.1).unwrap();
        let upper = -model.quantile(0.001).unwrap();
        if (upper - 6.9078).abs() / 6.9078 <= 0.10 {
            close += 1;
        }

        // Radially heavy (Pareto) but truncated: the fitted tail keeps its
        // weight and extrapolates far beyond the cutoff no sample point can
        // cross, so the hull sits strictly inside the estimated envelope.
        let pts: Vec<Point2> = (0..2000)
            .map(|_| {
                let radius = 1.0 / (1.0 - rng.random::<f64>() * (11.0 / 12.0));
                let a = rng.random_range(0.0..TAU);
                Point2::new(radius * a.cos(), radius * a.sin())
            })
            .collect();
        let dirs = DirectionSet::uniform(40).unwrap();
        let est = ExtremeEstimator::new(0.25);
        let env = build_envelope(&pts, 1e-4, &dirs, &est).unwrap();
        for h in &env.halfplanes {
            for &x in &pts {
                assert!(
                    h.slack(x) > 0.0,
                    "rep {rep}: sample point {x:?} not strictly inside"
                );
            }
        }
    }
    assert!(close >= 90, "only {close} of 100 tail estimates within 10%");
    verdict.pass();
}

#[test]
fn a10_biplot_simplicity() {
    let verdict = Criterion::start("criterion 10 biplot simplicity");
    let est = inf_estimator();
    let dirs = DirectionSet::uniform(64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    for _ in 0..200 {
        let n = rng.random_range(20..=120usize);
        let a = rng.random_range(0.5..3.0);
        let b = rng.random_range(-1.5..1.5);
        let c = rng.random_range(0.5..3.0);
        let pts: Vec<Point2> = (0..n)
            .map(|_| {
                let z1 = normal(&mut rng);
                let z2 = normal(&mut rng);
                Point2::new(a * z1, b * z1 + c * z2)
            })
            .collect();
        let (_, median_region) = deepest_region(&pts).unwrap();
        let origin = median_region.vertex_centroid().unwrap();
        let curve = biplot_curve(&pts, 0.25, origin, &dirs, &est).unwrap();
        assert!(
            !polyline_self_intersects(&curve, true),
            "deep origin produced a crossing"
        );
    }

    // Three tight clusters, all far to the right of an origin at zero: the
    // quantile radius changes sign and the curve is forced to cross itself.
    let mut pts = Vec::new();
    for (count, x, y) in [(40, 50.0, 1.0), (35, 28.0, 5.0), (25, 26.0, -6.0)] {
        for i in 0..count {
            let jitter = 1e-3 * i as f64 / count as f64;
            pts.push(Point2::new(x + jitter, y - jitter));
        }
    }
    let wide = DirectionSet::uniform(96).unwrap();
    let curve = biplot_curve(&pts, 0.3, Point2::new(0.0, 0.0), &wide, &est).unwrap();
    assert!(
        polyline_self_intersects(&curve, true),
        "distant origin failed to produce a crossing"
    );
    verdict.pass();
}

/// Total check loss of the residuals of a candidate line.
fn pinball_loss(pairs: &[(f64, f64)], p: f64, intercept: f64, slope: f64) -> f64 {
    pairs
        .iter()
        .map(|&(t, y)| {
            let r = y - intercept - slope * t;
            r * (p - if r < 0.0 { 1.0 } else { 0.0 })
        })
        .sum()
}

#[test]
fn a11_regression_exactness() {
    let verdict = Criterion::start("criterion 11 regression exactness");
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    let base: Vec<Point2> = (0..15)
        .map(|_| Point2::new(2.0 * normal(&mut rng), 1.5 * normal(&mut rng)))
        .collect();
    let drift = Point2::new(1.5, -0.8);
    let stops = [0.0, 0.5, 1.0, 1.5, 2.5, 4.0];
    let mut pts = Vec::new();
    let mut ts = Vec::new();
    for &t in &stops {
        for &b in &base {
            pts.push(b + drift * t);
            ts.push(t);
        }
    }
    let dirs = DirectionSet::uniform(48).unwrap();
    let cond = conditional_envelope(&pts, &ts, 2.0, 0.23, &dirs).unwrap();
    let shifted: Vec<Point2> = base.iter().map(|&b| b + drift * 2.0).collect();
    let target = build_envelope(&shifted, 0.23, &dirs, &inf_estimator()).unwrap();
    let h = hausdorff_distance(&cond.region, &target.region).unwrap();
    assert!(h <= 1e-6, "conditional region off by {h}");

    for _ in 0..500 {
        let n = rng.random_range(2..=30usize);
        let slope = rng.random_range(-2.0..2.0);
        let pairs: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let t = rng.random_range(0.0..10.0);
                (t, 2.0 + slope * t + 3.0 * normal(&mut rng))
            })
            .collect();
        let p = rng.random_range(0.05..0.95);
        let fit = linear_qr(&pairs, p).unwrap();
        let loss = pinball_loss(&pairs, p, fit.intercept, fit.slope);
        for i in 0..n {
            for j in (i + 1)..n {
                let (ti, yi) = pairs[i];
                let (tj, yj) = pairs[j];
                if ti == tj {
                    continue;
                }
                let cand_slope = (yj - yi) / (tj - ti);
                let cand_icept = yi - cand_slope * ti;
                let cand = pinball_loss(&pairs, p, cand_icept, cand_slope);
                assert!(
                    loss <= cand + 1e-9 * (1.0 + cand.abs()),
                    "fit loss {loss} beaten by pair line loss {cand}"
                );
            }
        }
    }
    verdict.pass();
}

#[test]
fn a12_performance() {
    let verdict = Criterion::start("criterion 12 performance");
    let mut rng = ChaCha8Rng::seed_from_u64(1212);
    let pts: Vec<Point2> = (0..100_000)
        .map(|_| {
            let z1 = normal(&mut rng);
            let z2 = normal(&mut rng);
            Point2::new(2.0 * z1, 0.7 * z1 + 1.1 * z2)
        })
        .collect();
    let dirs = DirectionSet::uniform(1009).unwrap();
    let ps = [0.05, 0.1, 0.2, 0.4];
    let threads = std::thread::available_parallelism().map_or(1, |v| v.get());
    let mut best = Duration::MAX;
    for _ in 0..3 {
        let clock = Instant::now();
        let table =
            quantile_table_parallel(&pts, dirs.dirs(), &ps, QuantileVersion::InfType1, threads)
                .unwrap();
        for (row, &p) in table.iter().zip(&ps) {
            let env = Envelope::from_directional_quantiles(p, &dirs, row).unwrap();
            assert!(!env.region.is_empty());
        }
        best = best.min(clock.elapsed());
    }
    assert!(
        best < Duration::from_secs(1),
        "envelope batch took {best:?}"
    );

    let constraints: Vec<Halfplane> = (0..1_000_000)
        .map(|k| {
            let s = UnitDirection::from_angle(TAU * k as f64 / 1_000_000.0);
            Halfplane::new(s, -1.0 - 0.2 * rng.random::<f64>())
        })
        .collect();
    let mut best = Duration::MAX;
    for _ in 0..3 {
        let clock = Instant::now();
        let region = intersect_halfplanes(&constraints).unwrap();
        assert_eq!(region.kind(), RegionKind::Polygon);
        best = best.min(clock.elapsed());
    }
    assert!(
        best < Duration::from_millis(200),
        "million-constraint intersection took {best:?}"
    );
    verdict.pass();
}
