use thiserror::Error;

/// Errors raised by the algebra, the transforms and the verification driver.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("mismatched cyclotomic primes: {left} vs {right}")]
    PrimeMismatch { left: u32, right: u32 },

    #[error("{0} is not a prime")]
    NotPrime(u32),

    #[error("expected {expected} coefficients for Q(zeta_{prime}), got {got}")]
    CoefficientLength { prime: u32, expected: usize, got: usize },

    #[error("field elements belong to different fields")]
    FieldMismatch,

    #[error("division by zero in F_q")]
    DivisionByZero,

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("function lives on `{found}` but the operator expects `{expected}`")]
    SetMismatch { expected: String, found: String },

    #[error("point is not in `{0}`")]
    PointNotInSet(String),

    #[error("orbit of point {0} is empty")]
    EmptyOrbit(usize),

    #[error("orbit map is not a partition at point {0}")]
    InconsistentOrbit(usize),

    #[error("matrix does not have determinant 1")]
    NotUnimodular,

    #[error("matrix is singular")]
    Singular,

    #[error("matrix is not symplectic for the antidiagonal form")]
    NotSymplectic,

    #[error("ratio against zero covector")]
    RatioAgainstZero,

    #[error("non-proportional ratio")]
    NonProportional,

    #[error("input outside restricted space S′")]
    OutsideRestrictedSpace,

    #[error("invalid Weyl letter `{0}` (expected s1 or s2)")]
    InvalidWeylLetter(String),

    #[error("{what} needs {required} points but the budget is {budget}; raise --budget to at least {required}")]
    OverBudget {
        what: String,
        required: u64,
        budget: u64,
    },

    #[error("unsupported parameters: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
