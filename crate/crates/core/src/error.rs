use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the numerical kernels.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// A density that must be strictly positive is not.
    NonPositiveDensity { value: f64 },
    /// An argument is outside the domain of the operation.
    Domain(&'static str),
    /// The linearized state has no sound speed (c̄ = 0).
    DegenerateState,
    /// `Id − iΘξδtΛ` is singular.
    SingularResolvent,
    /// The straight path between two entropy-variable states leaves ρ > 0.
    SegmentVacuum,
    /// A time step produced ρ ≤ 0 in some cell.
    Positivity { cell: usize, value: f64 },
    /// The Newton iteration of an implicit step did not reach its tolerance.
    NewtonDivergence { iterations: usize, residual: f64 },
    /// A solver or scheme configuration is inconsistent.
    InvalidConfig(&'static str),
    /// The linear system of a Newton iteration is singular.
    SingularMatrix,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonPositiveDensity { value } => write!(f, "non-positive density {value}"),
            Error::Domain(what) => write!(f, "argument out of domain: {what}"),
            Error::DegenerateState => f.write_str("degenerate linearized state (zero sound speed)"),
            Error::SingularResolvent => f.write_str("singular resolvent in implicit amplification factor"),
            Error::SegmentVacuum => f.write_str("density vanishes along the entropy-variable segment"),
            Error::Positivity { cell, value } => {
                write!(f, "positivity failure: density {value} in cell {cell}")
            }
            Error::NewtonDivergence { iterations, residual } => write!(
                f,
                "Newton iteration failed after {iterations} iterations (residual {residual:e})"
            ),
            Error::InvalidConfig(what) => write!(f, "invalid configuration: {what}"),
            Error::SingularMatrix => f.write_str("singular Jacobian in Newton iteration"),
        }
    }
}

impl core::error::Error for Error {}
