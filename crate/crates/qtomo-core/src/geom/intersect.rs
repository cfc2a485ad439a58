//! Bounded intersection of closed halfplanes.
//!
//! The public entry point is [`intersect_halfplanes`]. The pipeline:
//!
//! 1. order the constraints by normal angle (a cheap monotone surrogate of
//!    the angle is used, so presorted input costs no sort);
//! 2. coalesce parallel normals within [`PARALLEL_TOL`](super::PARALLEL_TOL)
//!    radians, keeping the tightest offset;
//! 3. refuse direction sets that fit in a closed halfplane through the
//!    origin (the intersection could not be bounded);
//! 4. run a deque sweep over the sorted constraints, which is linear after
//!    sorting and yields the active set for free;
//! 5. verify the candidate polygon against every constraint with a rotating
//!    support scan. Suspect results, thin results, and anything the sweep
//!    mishandles fall through to a slower clipping pass that classifies
//!    empty, point, and segment outcomes with explicit witnesses.
//!
//! Offsets are in data units and all tolerances are absolute; see the
//! constants on the parent module.

use super::{ConvexRegion, Halfplane, Point2, UnitDirection, COLLAPSE_TOL, PARALLEL_TOL,
            VERTEX_MERGE_TOL};
use super::metrics::{polygon_diameter_pair, polygon_min_width};
use crate::error::{Error, Result};
use crate::fmath;
use alloc::collections::VecDeque;
use alloc::vec::Vec;

/// Slack below which the deque sweep treats a candidate vertex as violating
/// the incoming constraint. Kept well under [`COLLAPSE_TOL`] so touching
/// constraints survive to the active set.
const POP_EPS: f64 = 1e-12;

/// Slack at which the clipping pass keeps a vertex on the boundary.
const KEEP_EPS: f64 = 1e-12;

/// Below this |cross product| two boundary lines are treated as parallel
/// and given no intersection vertex.
const DET_EPS: f64 = 1e-14;

/// Cross-product slack for the closed-halfplane (unbounded) test on
/// consecutive sorted normals.
const GAP_EPS: f64 = 1e-12;

/// One deduplicated constraint: the tightest offset among a bundle of
/// parallel normals, remembering which input it came from.
#[derive(Clone, Copy)]
struct Cn {
    s: UnitDirection,
    q: f64,
    orig: usize,
}

impl Cn {
    #[inline]
    fn slack(&self, p: Point2) -> f64 {
        self.s.dot(p) - self.q
    }
}

/// Intersection point of the two boundary lines, or `None` when they are
/// numerically parallel. Computed from the foot of the first line so the
/// residual against that line stays at rounding level.
#[inline]
fn line_vertex(a: &Cn, b: &Cn) -> Option<Point2> {
    let det = a.s.sx() * b.s.sy() - a.s.sy() * b.s.sx();
    if fmath::abs(det) < DET_EPS {
        return None;
    }
    let foot = a.s.scaled(a.q);
    let t = (b.q - b.s.dot(foot)) / det;
    Some(foot + a.s.perp().as_point() * t)
}

/// Monotone surrogate of the normal angle: maps the circle to `[0, 4)`
/// without trigonometry. Only used for ordering; closeness tests use exact
/// cross/dot products.
#[inline]
fn pseudo_angle(x: f64, y: f64) -> f64 {
    let r = x / (fmath::abs(x) + fmath::abs(y));
    if y >= 0.0 {
        1.0 - r
    } else {
        3.0 + r
    }
}

#[inline]
fn cross_dirs(a: UnitDirection, b: UnitDirection) -> f64 {
    a.sx() * b.sy() - a.sy() * b.sx()
}

/// Intersects the closed halfplanes `{x : s·x >= q}`.
///
/// Returns the region with its `active` list populated: indices into `hs`
/// of the constraints shaping the boundary, or the witnesses that collapse
/// the region for empty/point/segment results. Errors with
/// [`Error::UnboundedRegion`] when the normals fit in a closed halfplane
/// through the origin, and [`Error::NonFiniteValue`] on non-finite offsets.
pub fn intersect_halfplanes(hs: &[Halfplane]) -> Result<ConvexRegion> {
    if hs.is_empty() {
        return Err(Error::UnboundedRegion);
    }
    for h in hs {
        if !h.q.is_finite() {
            return Err(Error::NonFiniteValue);
        }
    }

    let presorted = {
        let mut prev = f64::NEG_INFINITY;
        hs.iter().all(|h| {
            let k = pseudo_angle(h.s.sx(), h.s.sy());
            let ok = k >= prev;
            prev = k;
            ok
        })
    };

    // Coalesce parallel normals; the tightest offset (largest q) wins, ties
    // resolved toward the earliest input index.
    let mut groups: Vec<Cn> = Vec::with_capacity(hs.len());
    let mut anchor = UnitDirection::from_angle(0.0);
    let absorb = |groups: &mut Vec<Cn>, anchor: &mut UnitDirection, oi: usize| {
        let h = &hs[oi];
        let same = groups.last().is_some()
            && h.s.dot_dir(*anchor) > 0.0
            && fmath::abs(cross_dirs(*anchor, h.s)) < PARALLEL_TOL;
        if same {
            let g = groups.last_mut().unwrap();
            if h.q > g.q {
                g.q = h.q;
                g.s = h.s;
                g.orig = oi;
            }
        } else {
            groups.push(Cn {
                s: h.s,
                q: h.q,
                orig: oi,
            });
            *anchor = h.s;
        }
    };
    if presorted {
        for oi in 0..hs.len() {
            absorb(&mut groups, &mut anchor, oi);
        }
    } else {
        let keys: Vec<f64> = hs
            .iter()
            .map(|h| pseudo_angle(h.s.sx(), h.s.sy()))
            .collect();
        let mut order: Vec<u32> = (0..hs.len() as u32).collect();
        order.sort_unstable_by(|&i, &j| {
            keys[i as usize]
                .total_cmp(&keys[j as usize])
                .then(i.cmp(&j))
        });
        for &oi in &order {
            absorb(&mut groups, &mut anchor, oi as usize);
        }
    }
    // The sweep is cyclic, so the first and last bundle can be the same
    // normal split across the wrap.
    if groups.len() >= 2 {
        let first = groups[0];
        let last = *groups.last().unwrap();
        if first.s.dot_dir(last.s) > 0.0 && fmath::abs(cross_dirs(last.s, first.s)) < PARALLEL_TOL
        {
            if last.q > first.q || (last.q == first.q && last.orig < first.orig) {
                groups[0] = last;
            }
            groups.pop();
        }
    }

    // Opposing-slab scan: a pair of antipodal normals with negative width
    // is an immediate empty certificate, decisive even when the family
    // does not span the plane; a pair within the collapse tolerance flags
    // the whole intersection as degenerate.
    let m = groups.len();
    let gkeys: Vec<f64> = groups
        .iter()
        .map(|g| pseudo_angle(g.s.sx(), g.s.sy()))
        .collect();
    let mut suspect = false;
    // As i walks the sorted keys, the opposite key ascends too, except for
    // one wrap where it falls back past 0. Splitting the scan by which
    // side of its own key the opposite lands on gives two monotone target
    // sequences, so two merged forward pointers replace any binary search;
    // the rounding in the keys sits far below the 1e-9 window slack. A
    // window crossing the wrap at 0 or 4 continues on the other end.
    let mut lo_up = 0usize;
    let mut lo_dn = 0usize;
    for i in 0..m {
        let opp = groups[i].s.opposite();
        let target = pseudo_angle(opp.sx(), opp.sy());
        let lo = if target >= gkeys[i] { &mut lo_up } else { &mut lo_dn };
        while *lo < m && gkeys[*lo] < target - 1e-9 {
            *lo += 1;
        }
        let mut j = *lo;
        while j < m && gkeys[j] <= target + 1e-9 {
            if check_slab(&groups, i, j, &mut suspect) {
                return Ok(empty_pair(&groups, i, j));
            }
            j += 1;
        }
        if target + 1e-9 > 4.0 {
            let spill = target + 1e-9 - 4.0;
            let mut j = 0usize;
            while j < m && gkeys[j] <= spill {
                if check_slab(&groups, i, j, &mut suspect) {
                    return Ok(empty_pair(&groups, i, j));
                }
                j += 1;
            }
        }
        if target - 1e-9 < 0.0 {
            let floor = target - 1e-9 + 4.0;
            let mut j = m;
            while j > 0 && gkeys[j - 1] >= floor {
                j -= 1;
                if check_slab(&groups, i, j, &mut suspect) {
                    return Ok(empty_pair(&groups, i, j));
                }
            }
        }
    }

    // Closed-halfplane test on the deduplicated normals: any cyclic gap of
    // pi or more means a feasible intersection cannot be bounded.
    if m < 3 {
        return Err(Error::UnboundedRegion);
    }
    for i in 0..m {
        let a = groups[i].s;
        let b = groups[(i + 1) % m].s;
        let cr = cross_dirs(a, b);
        if cr < -GAP_EPS || (cr <= GAP_EPS && a.dot_dir(b) < 0.0) {
            return Err(Error::UnboundedRegion);
        }
    }

    if !suspect {
        if let Some(region) = sweep(&groups) {
            return Ok(region);
        }
    }
    Ok(clip(&groups))
}

/// True when groups `i`, `j` form an antipodal pair whose slab is
/// infeasible beyond tolerance; flips `suspect` for collapsed slabs.
fn check_slab(groups: &[Cn], i: usize, j: usize, suspect: &mut bool) -> bool {
    if i == j {
        return false;
    }
    let a = groups[i];
    let b = groups[j];
    if a.s.dot_dir(b.s) >= 0.0 || fmath::abs(cross_dirs(a.s, b.s)) >= PARALLEL_TOL {
        return false;
    }
    // a: s·x >= q_a, b: -s·x >= q_b, so s·x <= -q_b and the width is
    // -q_b - q_a.
    let width = -b.q - a.q;
    if width < -COLLAPSE_TOL {
        return true;
    }
    if width <= COLLAPSE_TOL {
        *suspect = true;
    }
    false
}

fn empty_pair(groups: &[Cn], i: usize, j: usize) -> ConvexRegion {
    let mut act = alloc::vec![groups[i].orig, groups[j].orig];
    act.sort_unstable();
    ConvexRegion::empty_with(act)
}

/// Deque sweep over angle-sorted constraints. Returns `None` whenever the
/// outcome is not a clean full-dimensional polygon; the caller then falls
/// back to [`clip`].
fn sweep(groups: &[Cn]) -> Option<ConvexRegion> {
    let m = groups.len();
    let violated = |g: &Cn, v: Point2| g.slack(v) < -POP_EPS;
    let mut dq: VecDeque<usize> = VecDeque::with_capacity(m);
    // The front pair changes only on a front pop, so its vertex is cached
    // across the (common) iterations that leave it alone.
    let mut front: Option<(usize, usize, Option<Point2>)> = None;

    for i in 0..m {
        loop {
            let l = dq.len();
            if l < 2 {
                break;
            }
            match line_vertex(&groups[dq[l - 2]], &groups[dq[l - 1]]) {
                Some(v) if violated(&groups[i], v) => {
                    dq.pop_back();
                }
                _ => break,
            }
        }
        loop {
            let l = dq.len();
            if l < 2 {
                break;
            }
            let pair = (dq[0], dq[1]);
            let cached = match front {
                Some((a, b, v)) if (a, b) == pair => v,
                _ => {
                    let v = line_vertex(&groups[pair.0], &groups[pair.1]);
                    front = Some((pair.0, pair.1, v));
                    v
                }
            };
            match cached {
                Some(v) if violated(&groups[i], v) => {
                    dq.pop_front();
                }
                _ => break,
            }
        }
        dq.push_back(i);
    }
    // Wrap cleanup: the ends of the deque must also respect each other.
    loop {
        let mut popped = false;
        while dq.len() >= 3 {
            let l = dq.len();
            match line_vertex(&groups[dq[l - 2]], &groups[dq[l - 1]]) {
                Some(v) if violated(&groups[dq[0]], v) => {
                    dq.pop_back();
                    popped = true;
                }
                _ => break,
            }
        }
        while dq.len() >= 3 {
            match line_vertex(&groups[dq[0]], &groups[dq[1]]) {
                Some(v) if violated(&groups[*dq.back().unwrap()], v) => {
                    dq.pop_front();
                    popped = true;
                }
                _ => break,
            }
        }
        if !popped {
            break;
        }
    }
    if dq.len() < 3 {
        return None;
    }

    // Consecutive survivors must stay under a half turn apart, otherwise
    // the sweep lost a side and the vertices would wind the wrong way.
    let idx: Vec<usize> = dq.into_iter().collect();
    let k = idx.len();
    for i in 0..k {
        let a = groups[idx[i]].s;
        let b = groups[idx[(i + 1) % k]].s;
        let cr = cross_dirs(a, b);
        if cr < GAP_EPS {
            return None;
        }
    }

    // Materialize vertices, dropping survivors whose edge has collapsed to
    // nothing (they touch the boundary in a single point).
    let mut live = idx;
    for _pass in 0..8 {
        let k = live.len();
        if k < 3 {
            return None;
        }
        let mut verts: Vec<Point2> = Vec::with_capacity(k);
        for i in 0..k {
            let v = line_vertex(&groups[live[i]], &groups[live[(i + 1) % k]])?;
            if !v.is_finite() {
                return None;
            }
            verts.push(v);
        }
        // Edge of live[i] runs from verts[i-1] to verts[i].
        let mut drop_one = None;
        for i in 0..k {
            if verts[(i + k - 1) % k].dist(verts[i]) < VERTEX_MERGE_TOL {
                drop_one = Some(i);
                break;
            }
        }
        match drop_one {
            Some(i) => {
                live.remove(i);
            }
            None => {
                // Edge vertices in CCW order start at the edge of live[0].
                if polygon_min_width(&verts) < COLLAPSE_TOL {
                    return None;
                }
                if !support_verify(groups, &verts) {
                    return None;
                }
                let mut act: Vec<usize> = live.iter().map(|&i| groups[i].orig).collect();
                act.sort_unstable();
                return ConvexRegion::polygon_with(verts, act).ok();
            }
        }
    }
    None
}

/// Checks every constraint against the candidate polygon with a rotating
/// minimum-support scan: linear in constraints plus vertices.
fn support_verify(groups: &[Cn], verts: &[Point2]) -> bool {
    let k = verts.len();
    let mut j = 0usize;
    let mut best = groups[0].s.dot(verts[0]);
    for (t, &v) in verts.iter().enumerate().skip(1) {
        let val = groups[0].s.dot(v);
        if val < best {
            best = val;
            j = t;
        }
    }
    if best < groups[0].q - COLLAPSE_TOL {
        return false;
    }
    let mut advances = 0usize;
    let cap = 2 * k + groups.len() + 8;
    for g in &groups[1..] {
        loop {
            let jn = (j + 1) % k;
            if g.s.dot(verts[jn]) < g.s.dot(verts[j]) {
                j = jn;
                advances += 1;
                if advances > cap {
                    return false;
                }
            } else {
                break;
            }
        }
        if g.s.dot(verts[j]) < g.q - COLLAPSE_TOL {
            return false;
        }
    }
    true
}

/// Sentinel edge ids for the initial bounding box of the clipping pass.
const BOX_ID: usize = usize::MAX - 3;

#[derive(Clone, Copy)]
struct Cv {
    p: Point2,
    /// Group id of the edge leaving this vertex.
    eid: usize,
}

/// Robust fallback: clip a generous bounding box by every constraint in
/// sorted order, then classify the leftovers. Quadratic in the worst case
/// but only reached by small or degenerate instances.
fn clip(groups: &[Cn]) -> ConvexRegion {
    let m = groups.len();

    // Bounding radius: with the largest angular gap 2*alpha between
    // normals, any feasible x satisfies |x| <= max|q| / cos(alpha).
    let mut max_gap: f64 = 0.0;
    let mut max_q: f64 = 1.0;
    for i in 0..m {
        let a = groups[i].s;
        let b = groups[(i + 1) % m].s;
        let gap = fmath::atan2(cross_dirs(a, b), a.dot_dir(b));
        let gap = if gap < 0.0 { gap + core::f64::consts::TAU } else { gap };
        max_gap = max_gap.max(gap);
        max_q = max_q.max(fmath::abs(groups[i].q));
    }
    let gamma = fmath::cos(0.5 * max_gap).max(1e-140);
    let w = ((max_q / gamma) * 2.0 + 2.0).min(1e140);

    let mut cur: Vec<Cv> = alloc::vec![
        Cv { p: Point2::new(-w, -w), eid: BOX_ID },
        Cv { p: Point2::new(w, -w), eid: BOX_ID + 1 },
        Cv { p: Point2::new(w, w), eid: BOX_ID + 2 },
        Cv { p: Point2::new(-w, w), eid: BOX_ID + 3 },
    ];

    for (gi, g) in groups.iter().enumerate() {
        let k = cur.len();
        let slacks: Vec<f64> = cur.iter().map(|c| g.slack(c.p)).collect();
        if slacks.iter().all(|&d| d >= -KEEP_EPS) {
            continue;
        }
        let mut next: Vec<Cv> = Vec::with_capacity(k + 2);
        for j in 0..k {
            let a = cur[j];
            let b = cur[(j + 1) % k];
            let (da, db) = (slacks[j], slacks[(j + 1) % k]);
            let ain = da >= -KEEP_EPS;
            let bin = db >= -KEEP_EPS;
            if ain {
                next.push(a);
            }
            if ain != bin {
                let denom = da - db;
                if fmath::abs(denom) > 1e-300 {
                    let t = (da / denom).clamp(0.0, 1.0);
                    let c = a.p + (b.p - a.p) * t;
                    // Leaving the kept side: the new edge runs along g's
                    // boundary. Entering: the original edge continues.
                    let eid = if ain { gi } else { a.eid };
                    next.push(Cv { p: c, eid });
                }
            }
        }
        collapse_runs(&mut next);
        // A ring can legitimately thin out to two vertices (a zero-width
        // slab) or one (a single point); only total wipeout is empty.
        if next.is_empty() {
            return empty_witnessed(groups, &cur, gi);
        }
        cur = next;
    }

    collapse_runs(&mut cur);
    let pts: Vec<Point2> = cur.iter().map(|c| c.p).collect();
    let mut act: Vec<usize> = cur
        .iter()
        .filter(|c| c.eid < BOX_ID)
        .map(|c| groups[c.eid].orig)
        .collect();
    act.sort_unstable();
    act.dedup();

    if pts.len() < 3 {
        return match pts.len() {
            0 => ConvexRegion::empty_with(act),
            1 => ConvexRegion::point_with(pts[0], tight_active(groups, &pts)),
            _ => {
                if pts[0].dist(pts[1]) < COLLAPSE_TOL {
                    let c = midpoint(pts[0], pts[1]);
                    ConvexRegion::point_with(c, tight_active(groups, &[c]))
                } else {
                    ConvexRegion::segment_with(pts[0], pts[1], tight_active(groups, &pts))
                }
            }
        };
    }

    let (diam, da, db) = polygon_diameter_pair(&pts);
    if diam < COLLAPSE_TOL {
        let mut c = Point2::default();
        for &p in &pts {
            c = c + p;
        }
        let c = c * (1.0 / pts.len() as f64);
        return ConvexRegion::point_with(c, tight_active(groups, &[c]));
    }
    if polygon_min_width(&pts) < COLLAPSE_TOL {
        return ConvexRegion::segment_with(da, db, tight_active(groups, &[da, db]));
    }
    match ConvexRegion::polygon_with(pts.clone(), act.clone()) {
        Ok(r) => r,
        Err(_) => {
            // Rounding produced a locally non-convex ring; rebuild it from
            // the hull of the same points.
            let hull = convex_hull(pts);
            match ConvexRegion::polygon_with(hull.clone(), act.clone()) {
                Ok(r) => r,
                Err(_) => {
                    let (d, a, b) = polygon_diameter_pair(&hull);
                    if d < COLLAPSE_TOL {
                        ConvexRegion::point_with(a, tight_active(groups, &[a]))
                    } else {
                        ConvexRegion::segment_with(a, b, tight_active(groups, &[a, b]))
                    }
                }
            }
        }
    }
}

/// Constraint indices binding at any of the probe points of a collapsed
/// region, by scaled slack.
///
/// The ring's own edge ids are not enough once the polygon degenerates:
/// the constraints capping a zero-width slab stop owning edges, yet
/// without them the reported family would not pin the region down. Every
/// truly binding constraint sits within kernel tolerance of the probes,
/// so a generous threshold recovers the full certificate, and any extra
/// near-tight member still contains the region, keeping the family's
/// intersection unchanged.
fn tight_active(groups: &[Cn], probes: &[Point2]) -> Vec<usize> {
    let mut scale = 1.0f64;
    for g in groups {
        scale = scale.max(fmath::abs(g.q));
    }
    for p in probes {
        scale = scale.max(fmath::abs(p.x)).max(fmath::abs(p.y));
    }
    let tol = 1e-7 * scale;
    let mut act: Vec<usize> = groups
        .iter()
        .filter(|g| probes.iter().any(|&p| g.slack(p) <= tol))
        .map(|g| g.orig)
        .collect();
    act.sort_unstable();
    act.dedup();
    act
}

fn midpoint(a: Point2, b: Point2) -> Point2 {
    (a + b) * 0.5
}

/// Merge runs of coincident vertices, keeping the outgoing edge id of the
/// last vertex in each run.
fn collapse_runs(poly: &mut Vec<Cv>) {
    if poly.len() < 2 {
        return;
    }
    let mut out: Vec<Cv> = Vec::with_capacity(poly.len());
    for &cv in poly.iter() {
        match out.last_mut() {
            Some(last) if last.p.dist(cv.p) < VERTEX_MERGE_TOL => {
                last.eid = cv.eid;
            }
            _ => out.push(cv),
        }
    }
    while out.len() >= 2 {
        let first = out[0];
        let last = *out.last().unwrap();
        if first.p.dist(last.p) < VERTEX_MERGE_TOL {
            // The zero edge leaving `last` disappears; `first` keeps its
            // own outgoing edge.
            out.pop();
        } else {
            break;
        }
    }
    *poly = out;
}

/// Build the empty result when constraint `gi` wipes out the polygon,
/// preferring a three-constraint infeasibility certificate around the
/// least-violated vertex.
fn empty_witnessed(groups: &[Cn], before: &[Cv], gi: usize) -> ConvexRegion {
    let g = &groups[gi];
    let k = before.len();
    let mut j_best = 0usize;
    let mut s_best = f64::NEG_INFINITY;
    for (j, cv) in before.iter().enumerate() {
        let s = g.slack(cv.p);
        if s > s_best {
            s_best = s;
            j_best = j;
        }
    }
    let inc = before[(j_best + k - 1) % k].eid;
    let out = before[j_best].eid;
    if inc < BOX_ID && out < BOX_ID && inc != out {
        if let Some(w) = line_vertex(&groups[inc], &groups[out]) {
            let mut t1 = groups[inc].s.perp();
            if groups[out].s.dot_dir(t1) < 0.0 {
                t1 = t1.opposite();
            }
            let mut t2 = groups[out].s.perp();
            if groups[inc].s.dot_dir(t2) < 0.0 {
                t2 = t2.opposite();
            }
            let certified = g.slack(w) < -KEEP_EPS
                && g.s.dot_dir(t1) <= KEEP_EPS
                && g.s.dot_dir(t2) <= KEEP_EPS;
            if certified {
                let mut act = alloc::vec![groups[inc].orig, groups[out].orig, g.orig];
                act.sort_unstable();
                act.dedup();
                return ConvexRegion::empty_with(act);
            }
        }
    }
    // No clean certificate: report the whole deduplicated set as the
    // collapsing witness list.
    let mut act: Vec<usize> = groups.iter().map(|c| c.orig).collect();
    act.sort_unstable();
    ConvexRegion::empty_with(act)
}

/// Monotone-chain hull, counterclockwise without the closing repeat.
fn convex_hull(mut pts: Vec<Point2>) -> Vec<Point2> {
    pts.sort_unstable_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup_by(|a, b| a.dist(*b) < VERTEX_MERGE_TOL);
    let n = pts.len();
    if n < 3 {
        return pts;
    }
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * n);
    for &p in pts.iter().chain(pts.iter().rev()) {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            if (b - a).cross(p - b) <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull.pop();
    hull
}
