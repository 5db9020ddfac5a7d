use thiserror::Error;

use crate::exponent::Exponent;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("scale p/q = 1 is degenerate")]
    UnitScale,
    #[error("invalid scale: {0}")]
    InvalidScale(String),
    #[error("intervals failed to separate within {cap} refinements; operands may be algebraically dependent")]
    RefinementExhausted { cap: u32 },
    #[error("symbolic exponent compared without a registered scale context")]
    MissingContext,
    #[error("exponents belong to different scale contexts")]
    ContextMismatch,
    #[error("valuation of zero is undefined")]
    ZeroInput,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("series has no terms; its valuation is undefined")]
    ZeroSeries,
    #[error("substitution exponent must be positive, got {0}")]
    NonPositiveExponentScale(Exponent),
    #[error("coset membership of {0} cannot be settled by coefficient identity")]
    UndecidableMembership(Exponent),
    #[error("product of formal exponents is not representable: {0}")]
    UnrepresentableProduct(String),
    #[error("exponent {0} is not a nonnegative multiple of 1/l")]
    NotFracPoly(Exponent),
    #[error("equation is malformed: {0}")]
    MalformedEquation(String),
    #[error("equation is already homogeneous")]
    AlreadyHomogeneous,
    #[error("equation is not homogeneous")]
    NotHomogeneous,
    #[error("degenerate equation: {0}")]
    DegenerateEquation(String),
    #[error("base is already above one")]
    BaseAlreadyAboveOne,
    #[error("operation requires a rational base")]
    SymbolicBaseUnsupported,
    #[error("operation requires symbolic bases")]
    SymbolicOnly,
    #[error("seeds violate the equation at exponent {0}")]
    SeedInconsistent(Exponent),
    #[error("continuation is not uniquely determined at exponent {0}: {1}")]
    AmbiguousContinuation(Exponent, String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("class with irrational representative present at exponent {0}")]
    IrrationalClassPresent(Exponent),
    #[error("coefficient vanishes in {0}")]
    CoefficientVanishes(String),
    #[error("kernel is empty; this indicates a broken invariant")]
    KernelEmpty,
    #[error("window too small: {rows} usable equations for {unknowns} unknowns (margin {margin})")]
    WindowTooSmall { rows: usize, unknowns: usize, margin: usize },
    #[error("support not divisible: exponent {0}")]
    SupportNotDivisible(Exponent),
    #[error("second equation missing")]
    MissingEquation,
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
}

impl Error {
    pub(crate) fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}
