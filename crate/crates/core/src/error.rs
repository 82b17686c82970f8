use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    Domain(&'static str),
    /// A model or design parameter violates its invariants.
    InvalidParameter(&'static str),
    /// The number of sensor profiles does not match the network size.
    SensorCount { expected: usize, got: usize },
    /// The truncation point is outside the numerically supported range.
    Range { n: u32, max: u32 },
    /// A design with an active lower boundary was passed to the
    /// single-threshold analytics.
    NotRelaxed,
    /// Accumulated probability mass left `[0, 1]` by more than the guard.
    Instability { step: u32, value: f64 },
    /// An index combination has no defined boundary-knot shape.
    Structural(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(what) => write!(f, "domain error: {what}"),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::SensorCount { expected, got } => {
                write!(f, "expected {expected} sensor profiles, got {got}")
            }
            Error::Range { n, max } => {
                write!(f, "truncation point {n} exceeds supported maximum {max}")
            }
            Error::NotRelaxed => {
                write!(f, "lower boundary is active; use the double-threshold analytics")
            }
            Error::Instability { step, value } => write!(
                f,
                "numerical instability at step {step}: probability mass {value} outside [0, 1]"
            ),
            Error::Structural(what) => write!(f, "structural error: {what}"),
        }
    }
}

impl core::error::Error for Error {}
