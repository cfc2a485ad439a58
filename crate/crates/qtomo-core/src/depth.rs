//! Halfspace depth of planar points and its level-set machinery.
//!
//! The depth of a point x is the smallest fraction of the sample contained
//! in any closed halfplane whose boundary passes through x. A single
//! angular sweep computes it exactly in O(n log n): sort the directions
//! from x to the data points, then slide a closed half-turn window and take
//! the smallest count.
//!
//! Level sets {x : depth(x) >= p} are convex, and for an empirical sample
//! they are cut out by finitely many halfplanes: the directional quantile
//! only changes when the direction crosses a normal of a line through two
//! data points. [`critical_directions`] enumerates those normals and
//! [`depth_region`] intersects the corresponding rank quantile halfplanes,
//! giving an exact region without any grid search. [`deepest_region`]
//! bisects on the rank to find the innermost nonempty level set.

use crate::error::{Error, Result};
use crate::fmath;
use crate::geom::{intersect_halfplanes, ConvexRegion, Halfplane, Point2, UnitDirection};
use crate::quantile::{check_p, inf_rank, validate_points};
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

/// Points closer than this to the query are treated as sitting on it.
const COINCIDENT_TOL: f64 = 1e-12;

/// Angular slack when sliding the half-turn window and when deduplicating
/// candidate directions.
const ANGLE_TOL: f64 = 1e-12;

/// An exact depth: the halfplane count over the sample size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DepthValue {
    pub count: usize,
    pub n: usize,
}

impl DepthValue {
    #[inline]
    pub fn value(&self) -> f64 {
        self.count as f64 / self.n as f64
    }
}

/// Exact halfspace depth of `x` in the sample, by angular sweep.
///
/// Counting is closed: points on the boundary line belong to the
/// halfplane. Points coinciding with `x` belong to every halfplane through
/// it and contribute unconditionally.
pub fn halfspace_depth(points: &[Point2], x: Point2) -> Result<DepthValue> {
    validate_points(points)?;
    if !x.is_finite() {
        return Err(Error::NonFiniteValue);
    }
    let n = points.len();
    let mut angles: Vec<f64> = Vec::with_capacity(n);
    let mut coincident = 0usize;
    for &p in points {
        if p.dist(x) <= COINCIDENT_TOL {
            coincident += 1;
        } else {
            let d = p - x;
            let a = fmath::atan2(d.y, d.x);
            angles.push(if a < 0.0 { a + TAU } else { a });
        }
    }
    if angles.is_empty() {
        return Ok(DepthValue { count: n, n });
    }
    angles.sort_unstable_by(f64::total_cmp);
    // Closed arcs of length pi can start just past each data angle; the
    // extension by a full turn makes every window contiguous.
    let mut ext = angles.clone();
    for &a in &angles {
        ext.push(a + TAU);
    }
    let mut least = usize::MAX;
    for &a in &angles {
        let lo = a + ANGLE_TOL;
        let hi = a + PI + ANGLE_TOL;
        let below = |t: f64| ext.partition_point(|&v| v <= t);
        let inside = below(hi) - below(lo);
        // The window holds the far boundary ray; the near ray has just
        // slipped out, which is exactly where the count is smallest.
        least = least.min(inside);
        if least == 0 {
            break;
        }
    }
    Ok(DepthValue {
        count: coincident + least,
        n,
    })
}

/// Every direction in which the empirical directional quantile can change:
/// both normals of each line through two distinct data points, plus the
/// four axis directions. Sorted by angle, deduplicated at [`ANGLE_TOL`].
pub fn critical_directions(points: &[Point2]) -> Result<Vec<UnitDirection>> {
    validate_points(points)?;
    let n = points.len();
    let mut angles: Vec<f64> = Vec::with_capacity(2 * n * n.saturating_sub(1) / 2 + 4);
    for k in 0..4 {
        angles.push(k as f64 * PI / 2.0);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let d = points[j] - points[i];
            if d.norm() <= COINCIDENT_TOL {
                continue;
            }
            let t = fmath::atan2(d.y, d.x);
            for off in [PI / 2.0, -PI / 2.0] {
                let mut a = t + off;
                while a < 0.0 {
                    a += TAU;
                }
                while a >= TAU {
                    a -= TAU;
                }
                angles.push(a);
            }
        }
    }
    angles.sort_unstable_by(f64::total_cmp);
    let mut dirs: Vec<UnitDirection> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for &a in &angles {
        if a - last > ANGLE_TOL {
            dirs.push(UnitDirection::from_angle(a));
            last = a;
        }
    }
    // The list wraps: an angle just under a full turn duplicates one near
    // zero.
    while dirs.len() > 1 {
        let first = dirs[0].angle();
        let lastd = dirs[dirs.len() - 1].angle();
        if first + TAU - lastd <= ANGLE_TOL {
            dirs.pop();
        } else {
            break;
        }
    }
    Ok(dirs)
}

/// The depth level set at integer rank `k`: intersection over `dirs` of
/// the halfplanes at each direction's k-th smallest projection.
pub(crate) fn depth_region_by_rank(
    points: &[Point2],
    k: usize,
    dirs: &[UnitDirection],
) -> Result<ConvexRegion> {
    let mut hs: Vec<Halfplane> = Vec::with_capacity(dirs.len());
    let mut proj: Vec<f64> = Vec::with_capacity(points.len());
    for &s in dirs {
        proj.clear();
        proj.extend(points.iter().map(|&p| s.dot(p)));
        let (_, q, _) = proj.select_nth_unstable_by(k - 1, f64::total_cmp);
        hs.push(Halfplane::new(s, *q));
    }
    intersect_halfplanes(&hs)
}

/// The exact region {x : depth(x) >= p}, built over the full critical
/// direction set. Intended as a reference for moderate n: the direction
/// set is quadratic in the sample size.
pub fn depth_region(points: &[Point2], p: f64) -> Result<ConvexRegion> {
    validate_points(points)?;
    check_p(p)?;
    let dirs = critical_directions(points)?;
    depth_region_by_rank(points, inf_rank(p, points.len()), &dirs)
}

/// Mass of the closed complement side `{x : s.x <= q}` of a halfplane:
/// the fraction of points the tangent cuts off, boundary included.
pub fn tangent_mass(points: &[Point2], h: &Halfplane) -> Result<f64> {
    validate_points(points)?;
    let inside = points
        .iter()
        .filter(|&&p| h.s.dot(p) <= h.q + 1e-9)
        .count();
    Ok(inside as f64 / points.len() as f64)
}

/// Largest fraction of the sample lying on one line, over all lines
/// through at least one sample point; collinearity judged at 1e-9 radians
/// around each anchor.
pub fn max_hyperplane_mass(points: &[Point2]) -> Result<f64> {
    validate_points(points)?;
    let n = points.len();
    let mut best = 1usize;
    for i in 0..n {
        let a = points[i];
        let mut at_anchor = 0usize;
        let mut angles: Vec<f64> = Vec::with_capacity(n - 1);
        for &p in points {
            if p.dist(a) <= COINCIDENT_TOL {
                at_anchor += 1;
            } else {
                let d = p - a;
                // Lines have no orientation: fold the direction to [0, pi).
                let mut t = fmath::atan2(d.y, d.x);
                if t < 0.0 {
                    t += PI;
                }
                if t >= PI {
                    t -= PI;
                }
                angles.push(t);
            }
        }
        best = best.max(at_anchor);
        if angles.is_empty() {
            continue;
        }
        angles.sort_unstable_by(f64::total_cmp);
        // Group nearly-equal line angles, remembering the fold wraps at pi.
        let m = angles.len();
        let mut run = 1usize;
        for j in 1..m {
            if angles[j] - angles[j - 1] <= 1e-9 {
                run += 1;
            } else {
                run = 1;
            }
            best = best.max(at_anchor + run);
        }
        best = best.max(at_anchor + 1);
        // A line straddling the fold shows up as one run near 0 and one
        // near pi; join them.
        if angles[m - 1] + 1e-9 >= PI && angles[0] <= 1e-9 {
            let mut head = 0usize;
            while head < m && angles[head] - angles[0] <= 1e-9 {
                head += 1;
            }
            let mut tail = 0usize;
            while tail < m && angles[m - 1] - angles[m - 1 - tail] <= 1e-9 {
                tail += 1;
            }
            if head + tail <= m {
                best = best.max(at_anchor + head + tail);
            }
        }
    }
    Ok(best.min(n) as f64 / n as f64)
}

/// The innermost nonempty depth level set: the largest rank k whose region
/// survives, its level k/n, and the region itself.
pub fn deepest_region(points: &[Point2]) -> Result<(f64, ConvexRegion)> {
    validate_points(points)?;
    let n = points.len();
    let dirs = critical_directions(points)?;
    let nonempty = |k: usize| -> Result<Option<ConvexRegion>> {
        let r = depth_region_by_rank(points, k, &dirs)?;
        Ok(if r.is_empty() { None } else { Some(r) })
    };
    // Rank 1 always survives: every point of the sample lies in it.
    let mut lo = 1usize;
    let mut region = nonempty(1)?.ok_or(Error::EmptyRegion)?;
    let mut hi = n;
    while lo < hi {
        let mid = (lo + hi + 1) / 2;
        match nonempty(mid)? {
            Some(r) => {
                region = r;
                lo = mid;
            }
            None => {
                hi = mid - 1;
            }
        }
    }
    Ok((lo as f64 / n as f64, region))
}
