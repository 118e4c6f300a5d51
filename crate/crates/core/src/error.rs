use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("point {0} lies outside the domain")]
    PointOutsideDomain(String),
    #[error("operation not supported for {0}")]
    UnsupportedDomain(String),
    #[error("Moebius map is singular at {0}")]
    MapSingular(String),
    #[error("pole and evaluation point coincide")]
    CoincidentPoints,
    #[error("radius {radius} exceeds the boundary distance {delta}")]
    RadiusTooLarge { radius: f64, delta: f64 },
    #[error("iteration did not converge: {0}")]
    ConvergenceFailure(String),
    #[error("kernel truncation target unreachable at N = {0}")]
    TruncationFailure(usize),
    #[error("derivative order {0} exceeds the supported maximum")]
    OrderTooLarge(usize),
    #[error("finite-difference stencil leaves the domain")]
    StencilOutsideDomain,
    #[error("level {0} is not below the peak value 0")]
    LevelAbovePeak(f64),
    #[error("level {level} is within {band} of the critical level {critical}")]
    CriticalLevel { level: f64, critical: f64, band: f64 },
    #[error("only {0} samples fall in the convexity window (need 8)")]
    WindowTooNarrow(usize),
    #[error("argument outside the function domain: {0}")]
    DomainError(String),
    #[error("walk-on-spheres capture rate {0} below 99.9%")]
    NonConvergence(f64),
    #[error("Richardson extrapolants differ by {0}")]
    ExtrapolationUnstable(f64),
    #[error("domain has no critical point of the Green function")]
    NoCriticalPoint,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
