use core::fmt;

/// Errors produced by scenario validation and the numerical solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A field that must be strictly positive was not.
    NonPositive { field: &'static str, value: f64 },
    /// A field left its admissible range (e.g. delta outside [0, 1)).
    OutOfRange { field: &'static str, value: f64 },
    /// Two index-aligned collections disagree in length.
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    /// A scenario was given no user types.
    EmptyTypes,
    /// Every type has zero population; no contract can be designed.
    AllLambdaZero,
    /// A type value falls outside the density support.
    OutsideSupport { theta: f64, low: f64, high: f64 },
    /// The supplied density does not integrate to one.
    DensityNotNormalized { integral: f64 },
    /// The continuous solver produced an inadmissible contract function.
    SolverRejected(&'static str),
    /// The brute-force search found no feasible point.
    NoFeasiblePoint,
    /// Rounded per-type populations do not sum to the requested n.
    PopulationMismatch { expected: usize, actual: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonPositive { field, value } => {
                write!(f, "{field} must be positive, got {value}")
            }
            Error::OutOfRange { field, value } => {
                write!(f, "{field} out of range: {value}")
            }
            Error::LengthMismatch {
                what,
                expected,
                actual,
            } => write!(f, "{what}: expected length {expected}, got {actual}"),
            Error::EmptyTypes => write!(f, "scenario has no user types"),
            Error::AllLambdaZero => write!(f, "all type populations are zero"),
            Error::OutsideSupport { theta, low, high } => {
                write!(f, "theta {theta} outside support [{low}, {high}]")
            }
            Error::DensityNotNormalized { integral } => {
                write!(f, "density integrates to {integral}, expected 1")
            }
            Error::SolverRejected(why) => write!(f, "continuous solver rejected solution: {why}"),
            Error::NoFeasiblePoint => write!(f, "brute-force search found no feasible point"),
            Error::PopulationMismatch { expected, actual } => {
                write!(f, "rounded populations sum to {actual}, expected {expected}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
