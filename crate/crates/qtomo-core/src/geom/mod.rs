//! Planar geometry: directions, halfplanes, and bounded convex regions.
//!
//! Everything downstream (depth contours, quantile envelopes, reference
//! ellipses) is assembled from the three types here:
//!
//! * [`UnitDirection`], a unit vector on the circle;
//! * [`Halfplane`], the closed set `{x : s·x >= q}` with unit inward normal
//!   `s`;
//! * [`ConvexRegion`], the intersection result, which is either empty, a
//!   point, a segment, or a convex polygon in counterclockwise order.
//!
//! Coordinates are `f64` in data units, and the tolerances below are
//! absolute in those units. The kernel never scales its inputs.

use crate::error::{Error, Result};
use crate::fmath;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::ops::{Add, Mul, Neg, Sub};

mod intersect;
mod metrics;

pub use intersect::intersect_halfplanes;
pub use metrics::{hausdorff_distance, kappa, polyline_self_intersects};

/// Unit-norm and angle round-trip tolerance for directions.
pub const UNIT_TOL: f64 = 1e-12;

/// Two halfplane normals closer than this angle (radians) are treated as
/// parallel and coalesced; the tighter offset wins.
pub const PARALLEL_TOL: f64 = 1e-10;

/// An intersection thinner than this in some direction is reported as a
/// `Segment` or `Point` instead of a sliver polygon. Also the tolerance at
/// which stored vertices must satisfy their defining halfplanes.
pub const COLLAPSE_TOL: f64 = 1e-9;

/// Vertices closer than this are considered repeated and merged.
pub const VERTEX_MERGE_TOL: f64 = 1e-12;

/// A point (or free vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    #[inline]
    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product; positive when `o` is
    /// counterclockwise from `self`.
    #[inline]
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        fmath::norm2(self.x, self.y)
    }

    #[inline]
    pub fn dist(self, o: Point2) -> f64 {
        fmath::norm2(self.x - o.x, self.y - o.y)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    #[inline]
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    #[inline]
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    #[inline]
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// A unit vector on the circle, stored as its two components.
///
/// Construction keeps `sx^2 + sy^2 = 1` within [`UNIT_TOL`], and
/// [`angle`](UnitDirection::angle) round-trips with
/// [`from_angle`](UnitDirection::from_angle) to the same tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitDirection {
    sx: f64,
    sy: f64,
}

impl UnitDirection {
    /// Direction at `theta` radians counterclockwise from the positive x
    /// axis.
    pub fn from_angle(theta: f64) -> Self {
        UnitDirection {
            sx: fmath::cos(theta),
            sy: fmath::sin(theta),
        }
    }

    /// Normalizes `(x, y)`. Zero and non-finite vectors are refused.
    pub fn from_vector(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::NonFiniteValue);
        }
        let n = fmath::norm2(x, y);
        if n < 1e-150 {
            return Err(Error::DegenerateDirection);
        }
        Ok(UnitDirection {
            sx: x / n,
            sy: y / n,
        })
    }

    #[inline]
    pub fn sx(self) -> f64 {
        self.sx
    }

    #[inline]
    pub fn sy(self) -> f64 {
        self.sy
    }

    /// Angle in `[0, 2*pi)`.
    pub fn angle(self) -> f64 {
        let a = fmath::atan2(self.sy, self.sx);
        let a = if a < 0.0 { a + TAU } else { a };
        // atan2 of a tiny negative sy can land exactly on 2*pi after the
        // wrap; fold it back to keep the half-open range.
        if a >= TAU {
            0.0
        } else {
            a
        }
    }

    /// Projection of `p` onto this direction.
    #[inline]
    pub fn dot(self, p: Point2) -> f64 {
        self.sx * p.x + self.sy * p.y
    }

    #[inline]
    pub fn dot_dir(self, o: UnitDirection) -> f64 {
        self.sx * o.sx + self.sy * o.sy
    }

    /// Counterclockwise quarter turn. Exact: only negation and swap.
    #[inline]
    pub fn perp(self) -> UnitDirection {
        UnitDirection {
            sx: -self.sy,
            sy: self.sx,
        }
    }

    /// The opposite direction. Exact.
    #[inline]
    pub fn opposite(self) -> UnitDirection {
        UnitDirection {
            sx: -self.sx,
            sy: -self.sy,
        }
    }

    #[inline]
    pub fn as_point(self) -> Point2 {
        Point2::new(self.sx, self.sy)
    }

    /// The point at distance `k` along this direction.
    #[inline]
    pub fn scaled(self, k: f64) -> Point2 {
        Point2::new(self.sx * k, self.sy * k)
    }
}

/// The closed halfplane `{x : s·x >= q}`; `s` points into the kept side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Halfplane {
    pub s: UnitDirection,
    pub q: f64,
}

impl Halfplane {
    #[inline]
    pub const fn new(s: UnitDirection, q: f64) -> Self {
        Halfplane { s, q }
    }

    /// Signed slack of `p`: nonnegative inside, negative outside.
    #[inline]
    pub fn slack(&self, p: Point2) -> f64 {
        self.s.dot(p) - self.q
    }

    #[inline]
    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        self.slack(p) >= -tol
    }

    /// The boundary point closest to the origin.
    #[inline]
    pub fn foot(&self) -> Point2 {
        self.s.scaled(self.q)
    }
}

/// What a bounded halfplane intersection collapsed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionKind {
    Empty,
    Point,
    Segment,
    Polygon,
}

/// A bounded convex region: empty, a single point, a segment, or a convex
/// polygon.
///
/// Polygon vertices are stored counterclockwise, in convex position, with no
/// repeat within [`VERTEX_MERGE_TOL`]. `active` carries the indices (into
/// the halfplane list the region was built from) of the constraints that
/// contribute a boundary edge, or for collapsed regions the witnesses that
/// force the collapse; regions built directly from vertices leave it empty.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexRegion {
    kind: RegionKind,
    vertices: Vec<Point2>,
    active: Vec<usize>,
}

impl ConvexRegion {
    pub(crate) fn empty_with(active: Vec<usize>) -> Self {
        ConvexRegion {
            kind: RegionKind::Empty,
            vertices: Vec::new(),
            active,
        }
    }

    pub fn empty() -> Self {
        Self::empty_with(Vec::new())
    }

    pub(crate) fn point_with(p: Point2, active: Vec<usize>) -> Self {
        ConvexRegion {
            kind: RegionKind::Point,
            vertices: alloc::vec![p],
            active,
        }
    }

    pub fn point(p: Point2) -> Self {
        Self::point_with(p, Vec::new())
    }

    pub(crate) fn segment_with(a: Point2, b: Point2, active: Vec<usize>) -> Self {
        ConvexRegion {
            kind: RegionKind::Segment,
            vertices: alloc::vec![a, b],
            active,
        }
    }

    pub fn segment(a: Point2, b: Point2) -> Self {
        Self::segment_with(a, b, Vec::new())
    }

    /// Builds a polygon region from counterclockwise convex vertices.
    ///
    /// Rejects rings that are too short, not in strictly convex
    /// counterclockwise position, or that repeat a vertex within
    /// [`VERTEX_MERGE_TOL`].
    pub fn polygon(vertices: Vec<Point2>) -> Result<Self> {
        Self::polygon_with(vertices, Vec::new())
    }

    pub(crate) fn polygon_with(vertices: Vec<Point2>, active: Vec<usize>) -> Result<Self> {
        let k = vertices.len();
        if k < 3 {
            return Err(Error::DegenerateRegion);
        }
        let mut area2 = 0.0;
        for i in 0..k {
            let a = vertices[i];
            let b = vertices[(i + 1) % k];
            let c = vertices[(i + 2) % k];
            if !a.is_finite() {
                return Err(Error::NonFiniteValue);
            }
            if a.dist(b) < VERTEX_MERGE_TOL {
                return Err(Error::DegenerateRegion);
            }
            let e0 = b - a;
            let e1 = c - b;
            // Strict left turns, with slack proportional to the edge
            // lengths so short edges are not rejected on rounding noise.
            if e0.cross(e1) <= -1e-9 * e0.norm() * e1.norm() {
                return Err(Error::DegenerateRegion);
            }
            area2 += a.cross(b);
        }
        if area2 <= 0.0 {
            return Err(Error::DegenerateRegion);
        }
        Ok(ConvexRegion {
            kind: RegionKind::Polygon,
            vertices,
            active,
        })
    }

    #[inline]
    pub fn kind(&self) -> RegionKind {
        self.kind
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.kind == RegionKind::Empty
    }

    /// Stored vertices: none, one, two, or a counterclockwise ring.
    #[inline]
    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    /// Indices of the defining halfplanes that shape the boundary (or that
    /// witness the collapse for empty/point/segment results).
    #[inline]
    pub fn active(&self) -> &[usize] {
        &self.active
    }

    /// Membership with an absolute tolerance on the boundary.
    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        match self.kind {
            RegionKind::Empty => false,
            RegionKind::Point => p.dist(self.vertices[0]) <= tol,
            RegionKind::Segment => {
                metrics::point_segment_dist(p, self.vertices[0], self.vertices[1]) <= tol
            }
            RegionKind::Polygon => {
                let k = self.vertices.len();
                for i in 0..k {
                    let a = self.vertices[i];
                    let b = self.vertices[(i + 1) % k];
                    let e = b - a;
                    // Signed distance of p to the edge line, interior side
                    // positive.
                    if e.cross(p - a) < -tol * e.norm() {
                        return false;
                    }
                }
                true
            }
        }
    }

    /// Largest projection onto `u` over the region.
    pub fn support(&self, u: UnitDirection) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptyRegion);
        }
        let mut best = f64::NEG_INFINITY;
        for &v in &self.vertices {
            best = best.max(u.dot(v));
        }
        Ok(best)
    }

    /// Mean of the stored vertices.
    pub fn vertex_centroid(&self) -> Result<Point2> {
        if self.is_empty() {
            return Err(Error::EmptyRegion);
        }
        let mut c = Point2::default();
        for &v in &self.vertices {
            c = c + v;
        }
        Ok(c * (1.0 / self.vertices.len() as f64))
    }

    /// Largest pairwise distance over the region (0 for points).
    pub fn diameter(&self) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptyRegion);
        }
        Ok(metrics::polygon_diameter(&self.vertices))
    }

    /// Smallest width over all directions (0 for points and segments).
    pub fn min_width(&self) -> Result<f64> {
        match self.kind {
            RegionKind::Empty => Err(Error::EmptyRegion),
            RegionKind::Point | RegionKind::Segment => Ok(0.0),
            RegionKind::Polygon => Ok(metrics::polygon_min_width(&self.vertices)),
        }
    }
}

/// Largest projection of `r` onto `u`; errors on empty regions.
pub fn support_function(r: &ConvexRegion, u: UnitDirection) -> Result<f64> {
    r.support(u)
}

/// An affine map `x -> M x + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine2 {
    pub m: [[f64; 2]; 2],
    pub t: Point2,
}

impl Affine2 {
    pub const fn new(m: [[f64; 2]; 2], t: Point2) -> Self {
        Affine2 { m, t }
    }

    pub const fn identity() -> Self {
        Affine2::new([[1.0, 0.0], [0.0, 1.0]], Point2::new(0.0, 0.0))
    }

    #[inline]
    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    #[inline]
    pub fn apply(&self, p: Point2) -> Point2 {
        Point2::new(
            self.m[0][0] * p.x + self.m[0][1] * p.y + self.t.x,
            self.m[1][0] * p.x + self.m[1][1] * p.y + self.t.y,
        )
    }

    /// The linear part only.
    #[inline]
    pub fn linear(&self, p: Point2) -> Point2 {
        Point2::new(
            self.m[0][0] * p.x + self.m[0][1] * p.y,
            self.m[1][0] * p.x + self.m[1][1] * p.y,
        )
    }

    pub fn inverse(&self) -> Option<Affine2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        let inv = [
            [self.m[1][1] / d, -self.m[0][1] / d],
            [-self.m[1][0] / d, self.m[0][0] / d],
        ];
        let it = Point2::new(
            -(inv[0][0] * self.t.x + inv[0][1] * self.t.y),
            -(inv[1][0] * self.t.x + inv[1][1] * self.t.y),
        );
        Some(Affine2::new(inv, it))
    }

    /// How the inward normal of a halfplane transforms under this map: the
    /// image direction is the normalized inverse-transpose applied to `s`.
    pub fn normal_pushforward(&self, s: UnitDirection) -> Result<UnitDirection> {
        let inv = self.inverse().ok_or(Error::DegenerateDirection)?;
        // (M^{-1})^T s
        let x = inv.m[0][0] * s.sx() + inv.m[1][0] * s.sy();
        let y = inv.m[0][1] * s.sx() + inv.m[1][1] * s.sy();
        UnitDirection::from_vector(x, y)
    }
}
