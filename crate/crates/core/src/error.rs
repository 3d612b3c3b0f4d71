use thiserror::Error;

/// Errors raised by the analytic and p-adic layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Gamma evaluated at (or within tolerance of) a non-positive integer.
    #[error("gamma function pole at s = {0}")]
    GammaPole(i64),

    /// An iterative scheme did not reach its tolerance within the iteration cap.
    #[error("{scheme} did not converge within {iterations} iterations")]
    NonConvergence {
        scheme: &'static str,
        iterations: usize,
    },

    /// Generators that are (nearly) real-collinear.
    #[error("degenerate lattice: generators are linearly dependent over the reals")]
    DegenerateLattice,

    /// A value that was required to be a lattice point is not one.
    #[error("{0} is not a lattice point")]
    NotALatticePoint(String),

    /// Evaluation at a pole of a meromorphic function.
    #[error("pole: {0}")]
    Pole(String),

    /// Two routes to the same cached quantity disagree.
    #[error("consistency check failed: {0}")]
    Consistency(String),

    /// Argument outside the documented domain of an operation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// p-adic precision dropped below one digit.
    #[error("p-adic precision exhausted: {0}")]
    PrecisionExhausted(String),

    /// The cubic 4x^3 - g2 x - g3 does not split over the rationals.
    #[error("half-period values are irrational for this model")]
    IrrationalHalfPeriods,

    /// Input divisible by p where a p-adic unit was required.
    #[error("{0} is divisible by p = {1}")]
    Divisibility(String, u64),

    /// Logarithm of zero.
    #[error("logarithm of zero")]
    ZeroInput,
}

impl Error {
    /// True for errors that signal a mathematical domain problem (poles,
    /// lattice-point arguments) rather than a numerical or usage failure.
    pub fn is_domain_error(&self) -> bool {
        matches!(
            self,
            Error::GammaPole(_)
                | Error::Pole(_)
                | Error::NotALatticePoint(_)
                | Error::ZeroInput
                | Error::Divisibility(..)
                | Error::IrrationalHalfPeriods
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
