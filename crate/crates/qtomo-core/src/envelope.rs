//! Directional quantile envelopes: intersect one quantile-backed halfplane
//! per direction and keep the region plus a certificate of which
//! directions mattered.
//!
//! The envelope at level p is the set of points lying above the p-th
//! directional quantile in every chosen direction. With the lower order
//! statistic as the quantile it coincides with the halfspace-depth level
//! set once the direction set is rich enough, which is what
//! [`crate::depth::critical_directions`] supplies. Smaller direction sets
//! give an outer relaxation that shrinks as directions are added.

use crate::depth::critical_directions;
use crate::error::{Error, Result};
use crate::estimators::{linear_qr, DirectionalQuantileEstimator};
use crate::fmath;
use crate::geom::{intersect_halfplanes, ConvexRegion, Halfplane, Point2, UnitDirection};
use crate::quantile::{
    check_p, inf_rank, order_statistics, validate_points, QuantileVersion,
};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

/// A direction set kept sorted by angle, with its largest angular gap
/// precomputed.
///
/// Sorted order is what the intersection kernel's linear path expects, so
/// construction pays the sort once and every envelope build afterwards
/// skips it. Indices reported by envelopes refer to this sorted order.
#[derive(Debug, Clone)]
pub struct DirectionSet {
    dirs: Vec<UnitDirection>,
    max_gap: f64,
}

impl DirectionSet {
    /// n directions at equal angular spacing, starting from the positive
    /// x axis.
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::TooFewDirections(n));
        }
        let dirs = (0..n)
            .map(|k| UnitDirection::from_angle(TAU * k as f64 / n as f64))
            .collect();
        Ok(Self::finish(dirs))
    }

    /// The directions at which depth regions of `points` can change:
    /// normals of point-pair lines plus the axes.
    pub fn critical(points: &[Point2]) -> Result<Self> {
        Ok(Self::finish(critical_directions(points)?))
    }

    /// Wraps caller-chosen directions, sorting them by angle.
    pub fn from_directions(dirs: Vec<UnitDirection>) -> Result<Self> {
        if dirs.is_empty() {
            return Err(Error::TooFewDirections(0));
        }
        Ok(Self::finish(dirs))
    }

    fn finish(mut dirs: Vec<UnitDirection>) -> Self {
        dirs.sort_unstable_by(|a, b| a.angle().total_cmp(&b.angle()));
        let max_gap = if dirs.len() < 2 {
            TAU
        } else {
            let mut gap = dirs[0].angle() + TAU - dirs[dirs.len() - 1].angle();
            for w in dirs.windows(2) {
                gap = gap.max(w[1].angle() - w[0].angle());
            }
            gap
        };
        DirectionSet { dirs, max_gap }
    }

    pub fn dirs(&self) -> &[UnitDirection] {
        &self.dirs
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    /// Largest angular gap between consecutive directions.
    pub fn max_gap(&self) -> f64 {
        self.max_gap
    }

    /// True when the directions are not confined to a closed halfplane,
    /// the condition for envelope intersections to be bounded.
    pub fn spans_plane(&self) -> bool {
        self.dirs.len() >= 3 && self.max_gap < PI - 1e-12
    }
}

/// Envelope levels live in (0, 1/2]: beyond one half the halfplanes pass
/// each other and the region is empty for any sample.
fn check_level(p: f64) -> Result<()> {
    if !p.is_finite() || p <= 0.0 || p > 0.5 {
        return Err(Error::InvalidP(p));
    }
    Ok(())
}

/// A level, the halfplanes that defined it (in direction-set order), and
/// their intersection.
#[derive(Debug, Clone)]
pub struct Envelope {
    pub p: f64,
    pub halfplanes: Vec<Halfplane>,
    pub region: ConvexRegion,
}

impl Envelope {
    /// Indices into `halfplanes` of the constraints that shaped the
    /// region, or of an infeasible subfamily when the region is empty.
    pub fn active(&self) -> &[usize] {
        self.region.active()
    }

    /// Assembles an envelope from precomputed directional quantiles, one
    /// per direction in sorted order.
    ///
    /// Panics if `quantiles` and `dirs` have different lengths.
    pub fn from_directional_quantiles(
        p: f64,
        dirs: &DirectionSet,
        quantiles: &[f64],
    ) -> Result<Envelope> {
        assert_eq!(
            quantiles.len(),
            dirs.len(),
            "one quantile per direction required"
        );
        check_level(p)?;
        if !dirs.spans_plane() {
            return Err(Error::UnboundedRegion);
        }
        let halfplanes: Vec<Halfplane> = dirs
            .dirs()
            .iter()
            .zip(quantiles)
            .map(|(&s, &q)| Halfplane::new(s, q))
            .collect();
        let region = intersect_halfplanes(&halfplanes)?;
        Ok(Envelope {
            p,
            halfplanes,
            region,
        })
    }
}

/// Builds the level-p envelope of `points` over `dirs` using `est` for
/// the directional quantiles.
pub fn build_envelope(
    points: &[Point2],
    p: f64,
    dirs: &DirectionSet,
    est: &dyn DirectionalQuantileEstimator,
) -> Result<Envelope> {
    validate_points(points)?;
    check_level(p)?;
    if !dirs.spans_plane() {
        return Err(Error::UnboundedRegion);
    }
    let mut halfplanes = Vec::with_capacity(dirs.len());
    for &s in dirs.dirs() {
        halfplanes.push(Halfplane::new(s, est.evaluate(points, s, p)?));
    }
    let region = intersect_halfplanes(&halfplanes)?;
    Ok(Envelope {
        p,
        halfplanes,
        region,
    })
}

/// What a level needs from the batched order statistics: positions into
/// the shared rank list.
enum LevelPlan {
    Exact(usize),
    Interp(usize, usize, f64),
}

/// Empirical directional quantiles for several levels at once: each
/// direction is projected once and every level's order statistics are
/// pulled from the shared projection by repeated selection instead of a
/// full sort. Row i holds level `ps[i]` across `dirs`, in the given
/// order, and each entry equals what
/// [`crate::quantile::directional_quantile`] returns for that pair.
///
/// Entries depend only on their own direction, so a large direction set
/// may be split into slices, evaluated separately, and the rows
/// concatenated without changing any value.
pub fn empirical_quantile_table(
    points: &[Point2],
    dirs: &[UnitDirection],
    ps: &[f64],
    version: QuantileVersion,
) -> Result<Vec<Vec<f64>>> {
    validate_points(points)?;
    for &p in ps {
        check_p(p)?;
    }
    if ps.is_empty() {
        return Ok(Vec::new());
    }
    let n = points.len();
    let mut ranks: Vec<usize> = Vec::new();
    let push_rank = |ranks: &mut Vec<usize>, k: usize| -> usize {
        ranks.push(k);
        ranks.len() - 1
    };
    let plans: Vec<LevelPlan> = ps
        .iter()
        .map(|&p| match version {
            QuantileVersion::InfType1 => {
                LevelPlan::Exact(push_rank(&mut ranks, inf_rank(p, n)))
            }
            QuantileVersion::InterpolatedR7 => {
                let h = 1.0 + (n as f64 - 1.0) * p;
                let lo = (fmath::floor(h) as usize).clamp(1, n);
                let frac = h - lo as f64;
                if lo >= n || frac == 0.0 {
                    LevelPlan::Exact(push_rank(&mut ranks, lo))
                } else {
                    let a = push_rank(&mut ranks, lo);
                    let b = push_rank(&mut ranks, lo + 1);
                    LevelPlan::Interp(a, b, frac)
                }
            }
        })
        .collect();

    let mut table: Vec<Vec<f64>> =
        ps.iter().map(|_| Vec::with_capacity(dirs.len())).collect();
    let mut proj = vec![0.0; n];
    for &s in dirs {
        for (slot, &pt) in proj.iter_mut().zip(points) {
            *slot = s.dot(pt);
        }
        let vals = order_statistics(&mut proj, &ranks);
        for (plan, row) in plans.iter().zip(table.iter_mut()) {
            row.push(match *plan {
                LevelPlan::Exact(i) => vals[i],
                LevelPlan::Interp(i, j, f) => vals[i] + f * (vals[j] - vals[i]),
            });
        }
    }
    Ok(table)
}

/// Builds empirical envelopes at several levels in one pass over the
/// data, via [`empirical_quantile_table`].
///
/// Results match per-level [`build_envelope`] with an
/// [`crate::estimators::EmpiricalEstimator`] exactly.
pub fn empirical_envelopes(
    points: &[Point2],
    ps: &[f64],
    dirs: &DirectionSet,
    version: QuantileVersion,
) -> Result<Vec<Envelope>> {
    for &p in ps {
        check_level(p)?;
    }
    if !dirs.spans_plane() {
        return Err(Error::UnboundedRegion);
    }
    let table = empirical_quantile_table(points, dirs.dirs(), ps, version)?;
    let mut out = Vec::with_capacity(ps.len());
    for (&p, row) in ps.iter().zip(&table) {
        out.push(Envelope::from_directional_quantiles(p, dirs, row)?);
    }
    Ok(out)
}

/// Finds the largest level p = k/n whose envelope still covers at least
/// `target` of the sample, along with that envelope.
///
/// Coverage counts points inside or on the region boundary and is
/// non-increasing in p for quantile-backed envelopes, so the search
/// bisects over k. Fails with `NoEnvelope` when no admissible level
/// reaches the target, including samples too small to have one.
pub fn coverage_search(
    points: &[Point2],
    target: f64,
    dirs: &DirectionSet,
    est: &dyn DirectionalQuantileEstimator,
) -> Result<(f64, Envelope)> {
    validate_points(points)?;
    if !target.is_finite() || target <= 0.0 || target > 1.0 {
        return Err(Error::InvalidP(target));
    }
    if !dirs.spans_plane() {
        return Err(Error::UnboundedRegion);
    }
    let n = points.len();
    let nf = n as f64;
    let k_max = n / 2;
    if k_max == 0 {
        return Err(Error::NoEnvelope);
    }
    let coverage_ok = |env: &Envelope| {
        let covered = points
            .iter()
            .filter(|&&x| env.region.contains(x, 1e-9))
            .count();
        covered as f64 / nf + 1e-12 >= target
    };
    let first = build_envelope(points, 1.0 / nf, dirs, est)?;
    if !coverage_ok(&first) {
        return Err(Error::NoEnvelope);
    }
    let mut best = (1.0 / nf, first);
    let mut lo = 1;
    let mut hi = k_max;
    while lo < hi {
        let mid = (lo + hi + 1) / 2;
        let p = mid as f64 / nf;
        let env = build_envelope(points, p, dirs, est)?;
        if coverage_ok(&env) {
            best = (p, env);
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(best)
}

/// Traces the directional quantile curve around `origin`: for each
/// direction s, the point `origin + q s` where q is the level-p quantile
/// of the origin-centered projections.
///
/// The curve closes up around origins deep enough in the sample and
/// self-intersects around shallow ones, which makes it a visual depth
/// probe.
pub fn biplot_curve(
    points: &[Point2],
    p: f64,
    origin: Point2,
    dirs: &DirectionSet,
    est: &dyn DirectionalQuantileEstimator,
) -> Result<Vec<Point2>> {
    validate_points(points)?;
    check_p(p)?;
    if !origin.is_finite() {
        return Err(Error::NonFiniteValue);
    }
    let shifted: Vec<Point2> = points.iter().map(|&x| x - origin).collect();
    let mut out = Vec::with_capacity(dirs.len());
    for &s in dirs.dirs() {
        let q = est.evaluate(&shifted, s, p)?;
        out.push(origin + s.scaled(q));
    }
    Ok(out)
}

/// Envelope of the conditional distribution at covariate value `t0`,
/// obtained by fitting a check-loss line of projections on the covariate
/// per direction and evaluating it at `t0`.
///
/// Refuses to extrapolate outside the observed covariate range.
///
/// Panics if `covariate` and `points` have different lengths.
pub fn conditional_envelope(
    points: &[Point2],
    covariate: &[f64],
    t0: f64,
    p: f64,
    dirs: &DirectionSet,
) -> Result<Envelope> {
    assert_eq!(
        covariate.len(),
        points.len(),
        "one covariate value per point required"
    );
    validate_points(points)?;
    if covariate.iter().any(|t| !t.is_finite()) || !t0.is_finite() {
        return Err(Error::NonFiniteValue);
    }
    check_level(p)?;
    if !dirs.spans_plane() {
        return Err(Error::UnboundedRegion);
    }
    let (lo, hi) = covariate
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &t| {
            (a.min(t), b.max(t))
        });
    if lo == hi {
        return Err(Error::DegenerateCovariate);
    }
    if t0 < lo || t0 > hi {
        return Err(Error::ExtrapolationRefused { t0, lo, hi });
    }
    let mut pairs: Vec<(f64, f64)> = vec![(0.0, 0.0); points.len()];
    let mut halfplanes = Vec::with_capacity(dirs.len());
    for &s in dirs.dirs() {
        for (slot, (&t, &x)) in pairs.iter_mut().zip(covariate.iter().zip(points)) {
            *slot = (t, s.dot(x));
        }
        let fit = linear_qr(&pairs, p)?;
        halfplanes.push(Halfplane::new(s, fit.at(t0)));
    }
    let region = intersect_halfplanes(&halfplanes)?;
    Ok(Envelope {
        p,
        halfplanes,
        region,
    })
}
