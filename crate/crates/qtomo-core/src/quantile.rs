//! Univariate quantiles of samples and of directional projections.
//!
//! Two versions ship. `InfType1` is the left-continuous inverse of the
//! empirical CDF: the smallest value u with F(u) >= p, which is the
//! ceil(p*n)-th order statistic. `InterpolatedR7` linearly interpolates at
//! rank 1 + (n-1)p, the convention most plotting software defaults to.
//! `InfType1` is the one with exact depth semantics downstream; the
//! interpolated version gives slightly smaller, smoother envelopes.
//!
//! Rank arithmetic guards `p * n` against floating error with a relative
//! nudge of 1e-9: products within that distance of an integer are treated
//! as that integer. Off-by-one ranks are the failure mode everything here
//! is written to avoid, and [`check_loss`] exists as the independent
//! referee: a quantile is correct exactly when it minimizes the check loss.

use crate::error::{Error, Result};
use crate::fmath;
use crate::geom::{Point2, UnitDirection};
use alloc::vec::Vec;

/// Which univariate quantile the estimators compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantileVersion {
    /// The inf definition: smallest u with F(u) >= p, i.e. the
    /// ceil(p*n)-th order statistic.
    InfType1,
    /// Linear interpolation at rank 1 + (n-1)p.
    InterpolatedR7,
}

/// The closed interval of check-loss minimizers at one level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileSet {
    pub lo: f64,
    pub hi: f64,
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && 0.0 < p && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidP(p))
    }
}

pub(crate) fn validate_points(points: &[Point2]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::EmptySample);
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFiniteValue);
    }
    Ok(())
}

/// `p * n` with the integer decision made once: `(rank, exact)` where
/// `exact` says the product sits on an integer within the relative nudge.
fn graded_rank(p: f64, n: usize) -> (f64, bool) {
    let t = p * n as f64;
    let r = fmath::floor(t + 0.5);
    let exact = fmath::abs(t - r) <= 1e-9 * t.max(1.0) && r >= 1.0;
    (if exact { r } else { t }, exact)
}

/// 1-based rank of the `InfType1` quantile: ceil(p*n) under the nudge.
pub(crate) fn inf_rank(p: f64, n: usize) -> usize {
    let (t, exact) = graded_rank(p, n);
    let k = if exact { t } else { fmath::ceil(t) };
    (k as usize).clamp(1, n)
}

/// k-th smallest (1-based) of `scratch`, reordering it in place.
fn kth_in_place(scratch: &mut [f64], k: usize) -> f64 {
    let (_, v, _) = scratch.select_nth_unstable_by(k - 1, f64::total_cmp);
    *v
}

/// The k-th and (k+1)-th smallest values; the second repeats the first when
/// k is already the maximum rank.
fn adjacent_in_place(scratch: &mut [f64], k: usize) -> (f64, f64) {
    let n = scratch.len();
    let lo = kth_in_place(scratch, k);
    if k == n {
        return (lo, lo);
    }
    let mut hi = f64::INFINITY;
    for &v in &scratch[k..] {
        hi = hi.min(v);
    }
    (lo, hi)
}

fn quantile_scratch(scratch: &mut [f64], p: f64, version: QuantileVersion) -> f64 {
    let n = scratch.len();
    match version {
        QuantileVersion::InfType1 => kth_in_place(scratch, inf_rank(p, n)),
        QuantileVersion::InterpolatedR7 => {
            let h = 1.0 + (n as f64 - 1.0) * p;
            let lo = (fmath::floor(h) as usize).clamp(1, n);
            let frac = h - lo as f64;
            let (a, b) = adjacent_in_place(scratch, lo);
            a + frac * (b - a)
        }
    }
}

/// The p-th quantile of `values` in the requested version.
///
/// `values` must be finite; p must lie strictly inside (0, 1). The result
/// is always one of the data values (`InfType1`) or a convex combination of
/// two adjacent order statistics (`InterpolatedR7`), so it stays inside
/// `[min, max]`.
pub fn quantile(values: &[f64], p: f64, version: QuantileVersion) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    check_p(p)?;
    let mut scratch: Vec<f64> = values.to_vec();
    Ok(quantile_scratch(&mut scratch, p, version))
}

/// All minimizers of the check loss at level p, as a closed interval.
///
/// The interval is wider than a point exactly when `p * n` lands on an
/// integer rank k and the k-th and (k+1)-th order statistics differ.
pub fn quantile_set(values: &[f64], p: f64) -> Result<QuantileSet> {
    let n = values.len();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    check_p(p)?;
    let mut scratch: Vec<f64> = values.to_vec();
    let (t, exact) = graded_rank(p, n);
    if exact {
        let k = (t as usize).clamp(1, n);
        let (lo, hi) = adjacent_in_place(&mut scratch, k);
        Ok(QuantileSet { lo, hi })
    } else {
        let k = (fmath::ceil(t) as usize).clamp(1, n);
        let v = kth_in_place(&mut scratch, k);
        Ok(QuantileSet { lo: v, hi: v })
    }
}

/// Mean check (pinball) loss of guess `u` at level p:
/// `(1/n) * sum (x_i - u) * (p - [x_i - u < 0])`.
///
/// Convex and piecewise linear in `u`; its minimizers are precisely the
/// quantile set, making this the referee for the rank arithmetic above.
pub fn check_loss(values: &[f64], u: f64, p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    check_p(p)?;
    let mut acc = 0.0;
    for &x in values {
        let r = x - u;
        let w = if r < 0.0 { p - 1.0 } else { p };
        acc += r * w;
    }
    Ok(acc / values.len() as f64)
}

/// The p-th quantile of the projections of `points` onto `dir`.
pub fn directional_quantile(
    points: &[Point2],
    dir: UnitDirection,
    p: f64,
    version: QuantileVersion,
) -> Result<f64> {
    validate_points(points)?;
    check_p(p)?;
    let mut proj: Vec<f64> = points.iter().map(|&pt| dir.dot(pt)).collect();
    Ok(quantile_scratch(&mut proj, p, version))
}

/// Several order statistics of one buffer, each O(n), reordering the
/// buffer.
///
/// `ranks` are 1-based and may repeat or arrive unsorted; the output is
/// aligned with them. Selection runs largest rank first on a shrinking
/// prefix, so a batch of levels costs barely more than one.
pub(crate) fn order_statistics(scratch: &mut [f64], ranks: &[usize]) -> Vec<f64> {
    let n = scratch.len();
    debug_assert!(ranks.iter().all(|&k| 1 <= k && k <= n));
    let mut sorted: Vec<usize> = ranks.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted.dedup();
    let mut hi = n;
    let mut got: Vec<(usize, f64)> = Vec::with_capacity(sorted.len());
    for &k in &sorted {
        let v = kth_in_place(&mut scratch[..hi], k);
        got.push((k, v));
        hi = k;
    }
    ranks
        .iter()
        .map(|k| {
            let i = got.iter().position(|(r, _)| r == k).unwrap();
            got[i].1
        })
        .collect()
}
