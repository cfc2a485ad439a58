//! Directional quantile estimators: the contract plus the three shipped
//! implementations.
//!
//! An estimator maps (sample, direction, level) to an offset, and the
//! envelope construction is agnostic to which one it calls. All three are
//! translation and scale equivariant, which is what lets envelopes built
//! from them transform correctly under affine maps:
//!
//! * [`EmpiricalEstimator`]: the plain plug-in quantile of the projections;
//! * [`ExtremeEstimator`]: below a configurable tail threshold, replaces
//!   the empirical value with a generalized Pareto extrapolation fitted to
//!   the lower tail of the projections, reaching levels far beyond 1/n;
//! * [`linear_qr`] / [`conditional_envelope`]: check-loss linear regression
//!   of projections on a covariate, evaluated at a covariate value of
//!   interest, one fit per direction.

use crate::error::{Error, Result};
use crate::fmath;
use crate::geom::{Point2, UnitDirection};
use crate::quantile::{
    check_p, directional_quantile, quantile, validate_points, QuantileVersion,
};
use alloc::vec::Vec;

/// Maps a sample, a direction, and a level to a directional quantile
/// value. Implementations must be translation and scale equivariant.
pub trait DirectionalQuantileEstimator {
    fn evaluate(&self, points: &[Point2], dir: UnitDirection, p: f64) -> Result<f64>;
}

/// The plug-in estimator: project, then take the sample quantile.
#[derive(Debug, Clone, Copy)]
pub struct EmpiricalEstimator {
    pub version: QuantileVersion,
}

impl EmpiricalEstimator {
    pub const fn new(version: QuantileVersion) -> Self {
        EmpiricalEstimator { version }
    }
}

impl DirectionalQuantileEstimator for EmpiricalEstimator {
    fn evaluate(&self, points: &[Point2], dir: UnitDirection, p: f64) -> Result<f64> {
        directional_quantile(points, dir, p, self.version)
    }
}

/// A generalized Pareto fit to the lower tail of one projection.
///
/// `u` is the threshold in projection units: the model describes how far
/// below `u` the distribution reaches. `zeta_u` is the fraction of the
/// sample strictly below `u`.
#[derive(Debug, Clone, Copy)]
pub struct TailModel {
    pub threshold_fraction: f64,
    pub xi: f64,
    pub sigma: f64,
    pub u: f64,
    pub zeta_u: f64,
}

/// Fewest exceedances accepted by the tail fit.
pub const MIN_EXCEEDANCES: usize = 20;

/// Smallest sample the tail fit accepts.
pub const MIN_TAIL_SAMPLE: usize = 50;

/// Fits a generalized Pareto model to the lower tail of `proj`.
///
/// The threshold is the empirical `threshold_fraction`-quantile of the
/// projections; exceedances are the gaps `u - x` for values strictly below
/// it. Shape and scale come from the first two probability-weighted
/// moments, a closed form with no iterative optimizer:
/// `sigma = 2 b0 b1 / (b0 - 2 b1)`, `xi = 2 - b0 / (b0 - 2 b1)`.
pub fn fit_gpd_tail(proj: &[f64], threshold_fraction: f64) -> Result<TailModel> {
    if proj.is_empty() {
        return Err(Error::EmptySample);
    }
    if proj.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue);
    }
    check_p(threshold_fraction)?;
    let n = proj.len();
    if n < MIN_TAIL_SAMPLE {
        return Err(Error::TooFewExceedances {
            got: n,
            need: MIN_TAIL_SAMPLE,
        });
    }
    // Lower tail of proj is the upper tail of the negated values.
    let flipped: Vec<f64> = proj.iter().map(|&v| -v).collect();
    let uy = quantile(&flipped, 1.0 - threshold_fraction, QuantileVersion::InfType1)?;
    let mut exceed: Vec<f64> = flipped
        .iter()
        .filter(|&&y| y > uy)
        .map(|&y| y - uy)
        .collect();
    let k = exceed.len();
    if k < MIN_EXCEEDANCES {
        return Err(Error::TooFewExceedances {
            got: k,
            need: MIN_EXCEEDANCES,
        });
    }
    exceed.sort_unstable_by(f64::total_cmp);
    let b0 = exceed.iter().sum::<f64>() / k as f64;
    let mut b1 = 0.0;
    for (i, &e) in exceed.iter().enumerate() {
        // Weight of the i-th smallest exceedance (0-based): the fraction
        // of the remaining sample above it.
        b1 += e * (k - 1 - i) as f64;
    }
    b1 /= (k as f64) * (k as f64 - 1.0);
    let denom = b0 - 2.0 * b1;
    if !(denom > 0.0) {
        return Err(Error::DegenerateTail);
    }
    let sigma = 2.0 * b0 * b1 / denom;
    let xi = 2.0 - b0 / denom;
    if !(sigma > 0.0) || !sigma.is_finite() || !xi.is_finite() {
        return Err(Error::DegenerateTail);
    }
    Ok(TailModel {
        threshold_fraction,
        xi,
        sigma,
        u: -uy,
        zeta_u: k as f64 / n as f64,
    })
}

impl TailModel {
    /// The extrapolated p-th quantile of the modeled projection, for p at
    /// or below the exceedance fraction.
    ///
    /// At `p = zeta_u` this returns the threshold exactly, and the value
    /// decreases as p shrinks: deeper into the lower tail.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        check_p(p)?;
        if p > self.zeta_u {
            return Err(Error::OutOfRegime {
                p,
                zeta: self.zeta_u,
            });
        }
        let ratio = p / self.zeta_u;
        if fmath::abs(self.xi) < 1e-8 {
            // Exponential-tail limit of the shape parameter.
            Ok(self.u + self.sigma * fmath::ln(ratio))
        } else {
            Ok(self.u - (self.sigma / self.xi) * (fmath::powf(ratio, -self.xi) - 1.0))
        }
    }
}

/// Estimator that switches to the tail model for levels below the
/// threshold fraction and defers to the empirical quantile otherwise.
#[derive(Debug, Clone, Copy)]
pub struct ExtremeEstimator {
    pub threshold_fraction: f64,
}

impl ExtremeEstimator {
    pub const fn new(threshold_fraction: f64) -> Self {
        ExtremeEstimator { threshold_fraction }
    }
}

impl DirectionalQuantileEstimator for ExtremeEstimator {
    fn evaluate(&self, points: &[Point2], dir: UnitDirection, p: f64) -> Result<f64> {
        validate_points(points)?;
        check_p(p)?;
        if p >= self.threshold_fraction {
            return directional_quantile(points, dir, p, QuantileVersion::InfType1);
        }
        let proj: Vec<f64> = points.iter().map(|&pt| dir.dot(pt)).collect();
        let model = fit_gpd_tail(&proj, self.threshold_fraction)?;
        if p <= model.zeta_u {
            model.quantile(p)
        } else {
            // The sliver between the realized exceedance fraction and the
            // requested threshold: still data territory.
            quantile(&proj, p, QuantileVersion::InfType1)
        }
    }
}

/// A fitted line `y = intercept + slope * t` minimizing mean check loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearQRFit {
    pub intercept: f64,
    pub slope: f64,
}

impl LinearQRFit {
    #[inline]
    pub fn at(&self, t: f64) -> f64 {
        self.intercept + self.slope * t
    }
}

fn qr_loss(pairs: &[(f64, f64)], a: f64, b: f64, p: f64) -> f64 {
    let mut acc = 0.0;
    for &(t, y) in pairs {
        let r = y - (a + b * t);
        acc += r * if r < 0.0 { p - 1.0 } else { p };
    }
    acc / pairs.len() as f64
}

/// Exact check-loss line fit by enumerating all lines through two sample
/// points with distinct covariates.
///
/// Some optimal line always passes through two such points, so the scan is
/// a certificate, not a heuristic. Ties go to the smaller |slope|, then
/// the smaller intercept. Quadratically many candidates with a linear loss
/// evaluation each: meant for moderate n.
pub fn linear_qr(pairs: &[(f64, f64)], p: f64) -> Result<LinearQRFit> {
    if pairs.is_empty() {
        return Err(Error::EmptySample);
    }
    if pairs.iter().any(|&(t, y)| !t.is_finite() || !y.is_finite()) {
        return Err(Error::NonFiniteValue);
    }
    check_p(p)?;
    let n = pairs.len();
    if n < 2 {
        return Err(Error::DegenerateCovariate);
    }
    let t0 = pairs[0].0;
    if pairs.iter().all(|&(t, _)| t == t0) {
        return Err(Error::DegenerateCovariate);
    }
    let mut best: Option<(f64, LinearQRFit)> = None;
    for i in 0..n {
        for j in (i + 1)..n {
            let (ti, yi) = pairs[i];
            let (tj, yj) = pairs[j];
            if ti == tj {
                continue;
            }
            let slope = (yj - yi) / (tj - ti);
            let intercept = yi - slope * ti;
            if !slope.is_finite() || !intercept.is_finite() {
                continue;
            }
            let loss = qr_loss(pairs, intercept, slope, p);
            let cand = LinearQRFit { intercept, slope };
            let better = match &best {
                None => true,
                Some((bl, bf)) => {
                    loss < *bl
                        || (loss == *bl
                            && (fmath::abs(slope) < fmath::abs(bf.slope)
                                || (fmath::abs(slope) == fmath::abs(bf.slope)
                                    && intercept < bf.intercept)))
                }
            };
            if better {
                best = Some((loss, cand));
            }
        }
    }
    Ok(best.expect("covariate spread guarantees a candidate").1)
}
