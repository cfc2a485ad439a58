//! Gaussian reference contours to hold next to sample envelopes.
//!
//! Fits a bivariate normal by moments and draws its elliptical contours
//! with either of two indexings: by the mass the ellipse encloses, or by
//! the mass left outside a tangent line. The second is the one comparable
//! to quantile envelopes, whose supporting halfplanes cut off exactly the
//! level mass; eyeballing an envelope against an enclosed-mass ellipse is
//! the classic way to misread how heavy a tail is.

use crate::error::{Error, Result};
use crate::fmath;
use crate::geom::{ConvexRegion, Point2};
use crate::quantile::validate_points;
use alloc::vec::Vec;
use core::f64::consts::TAU;

/// Ratio of smallest to largest covariance eigenvalue below which the fit
/// is reported as singular.
const EIGEN_RATIO_TOL: f64 = 1e-12;

/// Sample mean and covariance with the covariance's lower Cholesky factor
/// kept alongside.
#[derive(Debug, Clone, Copy)]
pub struct NormalFit {
    pub mean: Point2,
    /// Covariance entries: [[xx, xy], [xy, yy]], the n-1 normalization.
    pub cov: [[f64; 2]; 2],
    l11: f64,
    l21: f64,
    l22: f64,
}

impl NormalFit {
    /// Lower-triangular factor L with L Lᵀ equal to the covariance.
    pub fn chol(&self) -> [[f64; 2]; 2] {
        [[self.l11, 0.0], [self.l21, self.l22]]
    }

    /// Support value of the ideal radius-r contour ellipse in direction
    /// `(ux, uy)`: mean projection plus r |Lᵀu|.
    pub fn ellipse_support(&self, r: f64, ux: f64, uy: f64) -> f64 {
        let tx = self.l11 * ux + self.l21 * uy;
        let ty = self.l22 * uy;
        ux * self.mean.x + uy * self.mean.y + r * fmath::norm2(tx, ty)
    }
}

/// Moment fit of a bivariate normal. Needs three points in general
/// position; flat or nearly flat clouds are refused rather than squeezed
/// into a rank-deficient model.
pub fn fit_normal(points: &[Point2]) -> Result<NormalFit> {
    validate_points(points)?;
    let n = points.len();
    if n < 3 {
        return Err(Error::SingularCovariance);
    }
    let nf = n as f64;
    let mut mx = 0.0;
    let mut my = 0.0;
    for p in points {
        mx += p.x;
        my += p.y;
    }
    mx /= nf;
    my /= nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for p in points {
        let dx = p.x - mx;
        let dy = p.y - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let denom = nf - 1.0;
    sxx /= denom;
    sxy /= denom;
    syy /= denom;
    let tr = sxx + syy;
    let gap = fmath::norm2(sxx - syy, 2.0 * sxy);
    let lo = 0.5 * (tr - gap);
    let hi = 0.5 * (tr + gap);
    if !(hi > 0.0) || !(lo > EIGEN_RATIO_TOL * hi) {
        return Err(Error::SingularCovariance);
    }
    let l11 = fmath::sqrt(sxx);
    let l21 = sxy / l11;
    let l22 = fmath::sqrt(syy - l21 * l21);
    Ok(NormalFit {
        mean: Point2::new(mx, my),
        cov: [[sxx, sxy], [sxy, syy]],
        l11,
        l21,
        l22,
    })
}

/// How a contour radius is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IndexingMode {
    /// The ellipse enclosing this much probability mass, in (0, 1).
    EnclosedMass(f64),
    /// The ellipse whose tangent lines each cut off this much mass, in
    /// (0, 1/2]. Comparable to a quantile envelope at the same level.
    TangentMass(f64),
}

/// Standardized radius for a mode: enclosed mass m gives
/// sqrt(-2 ln(1 - m)), tangent mass p gives the upper normal quantile.
pub fn indexing_radius(mode: IndexingMode) -> Result<f64> {
    match mode {
        IndexingMode::EnclosedMass(m) => {
            if !m.is_finite() || m <= 0.0 || m >= 1.0 {
                return Err(Error::InvalidP(m));
            }
            Ok(fmath::sqrt(-2.0 * fmath::ln_1p(-m)))
        }
        IndexingMode::TangentMass(p) => {
            if !p.is_finite() || p <= 0.0 || p > 0.5 {
                return Err(Error::InvalidP(p));
            }
            inverse_normal_cdf(1.0 - p)
        }
    }
}

/// Fewest vertices a contour polygon may have.
pub const MIN_CONTOUR_VERTICES: usize = 16;

/// Inscribes an n-gon in the mode's contour ellipse of the fit. The
/// half-mass tangent contour degenerates to the mean point.
pub fn normal_contour(
    fit: &NormalFit,
    mode: IndexingMode,
    n_vertices: usize,
) -> Result<ConvexRegion> {
    if n_vertices < MIN_CONTOUR_VERTICES {
        return Err(Error::TooFewDirections(n_vertices));
    }
    let r = indexing_radius(mode)?;
    if r == 0.0 {
        return Ok(ConvexRegion::point(fit.mean));
    }
    let mut vs = Vec::with_capacity(n_vertices);
    for k in 0..n_vertices {
        let a = TAU * k as f64 / n_vertices as f64;
        let cx = fmath::cos(a);
        let cy = fmath::sin(a);
        vs.push(Point2::new(
            fit.mean.x + r * fit.l11 * cx,
            fit.mean.y + r * (fit.l21 * cx + fit.l22 * cy),
        ));
    }
    ConvexRegion::polygon(vs)
}

/// erf by its non-alternating Maclaurin form: every term is positive, so
/// there is no cancellation, and the e^{-z^2} factor keeps the sum scaled.
fn erf_series(z: f64) -> f64 {
    let mut term = z;
    let mut sum = z;
    let mut k = 0u32;
    while term > sum * 1e-18 {
        k += 1;
        term *= 2.0 * z * z / (2.0 * k as f64 + 1.0);
        sum += term;
        if k > 200 {
            break;
        }
    }
    let two_over_sqrt_pi = 1.128_379_167_095_512_6;
    two_over_sqrt_pi * fmath::exp(-z * z) * sum
}

/// erfc by its Laplace continued fraction, evaluated with the modified
/// Lentz scheme. Fully accurate in the relative sense for z past 3, where
/// 1 - erf(z) would cancel.
fn erfc_fraction(z: f64) -> f64 {
    let mut f = z;
    let mut c = z;
    let mut d = 0.0;
    for k in 1..=200 {
        let a = 0.5 * k as f64;
        d = z + a * d;
        if fmath::abs(d) < 1e-300 {
            d = 1e-300;
        }
        d = 1.0 / d;
        c = z + a / c;
        if fmath::abs(c) < 1e-300 {
            c = 1e-300;
        }
        let delta = c * d;
        f *= delta;
        if fmath::abs(delta - 1.0) < 1e-17 {
            break;
        }
    }
    let inv_sqrt_pi = 0.564_189_583_547_756_3;
    inv_sqrt_pi * fmath::exp(-z * z) / f
}

/// Mass beyond z in erf units: the tail on the far side of |x|.
fn scaled_tail(z: f64) -> f64 {
    if z < 3.25 {
        0.5 * (1.0 - erf_series(z))
    } else {
        0.5 * erfc_fraction(z)
    }
}

/// Standard normal distribution function. Near machine precision in the
/// body, and relatively accurate deep into the lower tail.
pub fn normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x > 37.0 {
        return 1.0;
    }
    if x < -37.0 {
        return 0.0;
    }
    let tail = scaled_tail(fmath::abs(x) / core::f64::consts::SQRT_2);
    if x >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Standard normal quantile: rational initial guess refined with one
/// Halley step against [`normal_cdf`].
pub fn inverse_normal_cdf(p: f64) -> Result<f64> {
    if !p.is_finite() || p <= 0.0 || p >= 1.0 {
        return Err(Error::InvalidP(p));
    }
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;
    if p == 0.5 {
        return Ok(0.0);
    }
    // Work on the smaller tail, where the cdf carries relative accuracy,
    // and mirror the answer back at the end.
    let q = if p < 0.5 { p } else { 1.0 - p };
    let mut x = if q < P_LOW {
        let t = fmath::sqrt(-2.0 * fmath::ln(q));
        (((((C[0] * t + C[1]) * t + C[2]) * t + C[3]) * t + C[4]) * t + C[5])
            / ((((D[0] * t + D[1]) * t + D[2]) * t + D[3]) * t + 1.0)
    } else {
        let s = q - 0.5;
        let r = s * s;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * s
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    // One Halley step squeezes the initial 1e-9 relative error down to
    // machine level. Skipped far out where the density factor would
    // overflow and the rational guess already lands within float noise.
    if x * x < 1000.0 {
        let err = normal_cdf(x) - q;
        let sqrt_tau = 2.506_628_274_631_000_7;
        let u = err * sqrt_tau * fmath::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    Ok(if p < 0.5 { x } else { -x })
}
