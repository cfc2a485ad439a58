//! Crate-wide error type.
//!
//! Every fallible operation in this crate returns [`Error`]. Variants are
//! deliberately coarse: they name the precondition that failed, not the call
//! site, so callers can match on them without string inspection.

use core::fmt;

/// Failure modes shared across the geometry, quantile, and model layers.
#[derive(Debug, Clone, PartialEq)]
#[non_exhaustive]
pub enum Error {
    /// The direction set fits inside a closed halfplane through the origin,
    /// so the halfplane intersection cannot be bounded.
    UnboundedRegion,
    /// The operation needs a nonempty region.
    EmptyRegion,
    /// The operation needs a full-dimensional region, not a point or segment.
    DegenerateRegion,
    /// The sample holds no points.
    EmptySample,
    /// A coordinate was NaN or infinite; samples accept finite values only.
    NonFiniteValue,
    /// A zero (or non-finite) vector cannot be normalized into a direction.
    DegenerateDirection,
    /// Probability level outside the range the operation accepts.
    InvalidP(f64),
    /// Direction sets need at least three members to bound a region.
    TooFewDirections(usize),
    /// No candidate level produced an envelope meeting the coverage target.
    NoEnvelope,
    /// Too few exceedances above the threshold to fit a tail.
    TooFewExceedances { got: usize, need: usize },
    /// The exceedances carry no usable spread; the tail fit is undefined.
    DegenerateTail,
    /// The requested level is not below the fitted tail fraction.
    OutOfRegime { p: f64, zeta: f64 },
    /// The covariate column has no spread; no line can be identified.
    DegenerateCovariate,
    /// The evaluation point lies outside the observed covariate range.
    ExtrapolationRefused { t0: f64, lo: f64, hi: f64 },
    /// The sample covariance is (numerically) rank-deficient.
    SingularCovariance,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnboundedRegion => {
                write!(f, "directions lie in a closed halfplane; intersection is unbounded")
            }
            Error::EmptyRegion => write!(f, "region is empty"),
            Error::DegenerateRegion => write!(f, "region is not full-dimensional"),
            Error::EmptySample => write!(f, "sample is empty"),
            Error::NonFiniteValue => write!(f, "sample values must be finite"),
            Error::DegenerateDirection => write!(f, "cannot normalize a zero-length direction"),
            Error::InvalidP(p) => write!(f, "probability level {p} outside the accepted range"),
            Error::TooFewDirections(n) => {
                write!(f, "{n} directions given, at least 3 required")
            }
            Error::NoEnvelope => write!(f, "no level meets the coverage target"),
            Error::TooFewExceedances { got, need } => {
                write!(f, "{got} exceedances above threshold, at least {need} required")
            }
            Error::DegenerateTail => write!(f, "exceedances have no usable spread"),
            Error::OutOfRegime { p, zeta } => {
                write!(f, "level {p} is not below the tail fraction {zeta}")
            }
            Error::DegenerateCovariate => write!(f, "covariate has no spread"),
            Error::ExtrapolationRefused { t0, lo, hi } => {
                write!(f, "covariate value {t0} outside observed range [{lo}, {hi}]")
            }
            Error::SingularCovariance => write!(f, "sample covariance is singular"),
        }
    }
}

impl core::error::Error for Error {}

/// Shorthand used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
