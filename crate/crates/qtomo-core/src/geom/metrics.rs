//! Distances and shape diagnostics on convex regions.
//!
//! The Hausdorff distance here is exact for the stored vertex
//! representations: on convex sets the farthest point from the other set is
//! always an extreme point, so scanning vertices against edges of the other
//! region suffices.

use super::{ConvexRegion, Point2, RegionKind};
use crate::error::{Error, Result};
use crate::fmath;

/// Distance from `p` to the segment `[a, b]`.
pub(crate) fn point_segment_dist(p: Point2, a: Point2, b: Point2) -> f64 {
    let e = b - a;
    let len2 = e.dot(e);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (p - a).dot(e) / len2;
    let t = t.clamp(0.0, 1.0);
    p.dist(a + e * t)
}

/// Distance from `p` to a nonempty region.
fn point_region_dist(p: Point2, r: &ConvexRegion) -> f64 {
    let vs = r.vertices();
    match r.kind() {
        RegionKind::Empty => f64::INFINITY,
        RegionKind::Point => p.dist(vs[0]),
        RegionKind::Segment => point_segment_dist(p, vs[0], vs[1]),
        RegionKind::Polygon => {
            if r.contains(p, 0.0) {
                return 0.0;
            }
            let k = vs.len();
            let mut best = f64::INFINITY;
            for i in 0..k {
                best = best.min(point_segment_dist(p, vs[i], vs[(i + 1) % k]));
            }
            best
        }
    }
}

fn directed_hausdorff(from: &ConvexRegion, to: &ConvexRegion) -> f64 {
    let mut worst: f64 = 0.0;
    for &v in from.vertices() {
        worst = worst.max(point_region_dist(v, to));
    }
    worst
}

/// Symmetric Hausdorff distance between two nonempty regions.
///
/// Zero (within rounding) exactly when the regions coincide. Empty inputs
/// have no meaningful distance and are refused.
pub fn hausdorff_distance(a: &ConvexRegion, b: &ConvexRegion) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyRegion);
    }
    Ok(directed_hausdorff(a, b).max(directed_hausdorff(b, a)))
}

/// Worst-case ratio between boundary displacement and the offset sup-norm
/// that caused it, over the polygon's vertices.
///
/// At a vertex where the two adjacent edge normals meet at cosine `c`, a
/// sup-norm perturbation of the supporting offsets moves the vertex by up to
/// `sqrt(2 / (1 + c))` times as much; the region-level constant is the max
/// over vertices. Always at least 1. Collapsed and empty regions have no
/// vertex cones, so they are refused.
pub fn kappa(r: &ConvexRegion) -> Result<f64> {
    if r.kind() != RegionKind::Polygon {
        return Err(Error::DegenerateRegion);
    }
    let vs = r.vertices();
    let k = vs.len();
    let mut worst: f64 = 1.0;
    for i in 0..k {
        let prev = vs[(i + k - 1) % k];
        let cur = vs[i];
        let next = vs[(i + 1) % k];
        let e0 = cur - prev;
        let e1 = next - cur;
        // Inward edge normals are the edge directions turned a quarter left;
        // the cosine of the angle between them equals the cosine between the
        // edge directions themselves.
        let c = (e0.dot(e1) / (e0.norm() * e1.norm())).clamp(-1.0, 1.0);
        let denom = 1.0 + c;
        if denom <= 0.0 {
            return Err(Error::DegenerateRegion);
        }
        worst = worst.max(fmath::sqrt(2.0 / denom));
    }
    Ok(worst)
}

/// Largest pairwise distance over a convex counterclockwise ring (also
/// accepts 1- and 2-point inputs).
pub(crate) fn polygon_diameter(vs: &[Point2]) -> f64 {
    polygon_diameter_pair(vs).0
}

/// The diameter together with a pair of points realizing it.
pub(crate) fn polygon_diameter_pair(vs: &[Point2]) -> (f64, Point2, Point2) {
    let k = vs.len();
    match k {
        0 => (0.0, Point2::default(), Point2::default()),
        1 => (0.0, vs[0], vs[0]),
        2 => (vs[0].dist(vs[1]), vs[0], vs[1]),
        _ => {
            // Rotating antipodal pair: advance the far pointer while the
            // triangle area against the current edge keeps growing.
            let mut best: f64 = 0.0;
            let mut pair = (vs[0], vs[1]);
            let mut j = 1usize;
            let mut steps = 0usize;
            let cap = 4 * k + 4;
            for i in 0..k {
                let a = vs[i];
                let b = vs[(i + 1) % k];
                let e = b - a;
                while steps < cap {
                    let jn = (j + 1) % k;
                    if e.cross(vs[jn] - vs[j]) > 0.0 {
                        j = jn;
                        steps += 1;
                    } else {
                        break;
                    }
                }
                let da = a.dist(vs[j]);
                if da > best {
                    best = da;
                    pair = (a, vs[j]);
                }
                let db = b.dist(vs[j]);
                if db > best {
                    best = db;
                    pair = (b, vs[j]);
                }
            }
            (best, pair.0, pair.1)
        }
    }
}

/// Smallest slab width containing a convex counterclockwise ring.
pub(crate) fn polygon_min_width(vs: &[Point2]) -> f64 {
    let k = vs.len();
    if k < 3 {
        return 0.0;
    }
    let mut width = f64::INFINITY;
    let mut j = 1usize;
    let mut steps = 0usize;
    let cap = 4 * k + 4;
    for i in 0..k {
        let a = vs[i];
        let b = vs[(i + 1) % k];
        let e = b - a;
        let len = e.norm();
        if len == 0.0 {
            continue;
        }
        // Farthest vertex from this edge's line; it advances monotonically
        // as the edge rotates.
        while steps < cap {
            let jn = (j + 1) % k;
            if e.cross(vs[jn] - a) > e.cross(vs[j] - a) {
                j = jn;
                steps += 1;
            } else {
                break;
            }
        }
        width = width.min(e.cross(vs[j] - a) / len);
    }
    if width.is_finite() {
        width.max(0.0)
    } else {
        0.0
    }
}

/// Does the polyline (closed into a ring when `closed`) intersect itself?
///
/// Two segments count as crossing when they share any point and are not
/// adjacent in the traversal; zero-length segments are skipped. The check is
/// the quadratic pairwise one, which is fine at plotting resolutions.
pub fn polyline_self_intersects(points: &[Point2], closed: bool) -> bool {
    let n = points.len();
    let seg_count = if closed {
        n
    } else if n > 0 {
        n - 1
    } else {
        0
    };
    if seg_count < 2 {
        return false;
    }
    let seg = |i: usize| (points[i], points[(i + 1) % n]);
    for i in 0..seg_count {
        for jj in (i + 1)..seg_count {
            // Adjacent segments share an endpoint by construction.
            if jj == i + 1 || (closed && i == 0 && jj == seg_count - 1) {
                continue;
            }
            let (a, b) = seg(i);
            let (c, d) = seg(jj);
            if a.dist(b) < 1e-15 || c.dist(d) < 1e-15 {
                continue;
            }
            if segments_intersect(a, b, c, d) {
                return true;
            }
        }
    }
    false
}

fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let scale = (b - a).norm() * (d - c).norm();
    let tol = 1e-12 * scale.max(1e-300);
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if (o1 > tol && o2 < -tol || o1 < -tol && o2 > tol)
        && (o3 > tol && o4 < -tol || o3 < -tol && o4 > tol)
    {
        return true;
    }
    // Near-collinear contact: fall back to bounding-interval overlap along
    // the segment directions.
    let on_seg = |p: Point2, u: Point2, v: Point2, o: f64| -> bool {
        o.abs() <= tol
            && p.x >= u.x.min(v.x) - 1e-12
            && p.x <= u.x.max(v.x) + 1e-12
            && p.y >= u.y.min(v.y) - 1e-12
            && p.y <= u.y.max(v.y) + 1e-12
    };
    on_seg(c, a, b, o1) || on_seg(d, a, b, o2) || on_seg(a, c, d, o3) || on_seg(b, c, d, o4)
}
