use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("inverse of zero")]
    ZeroInversion,
    #[error("zero input")]
    ZeroInput,
    #[error("wrong characteristic: {0}")]
    WrongCharacteristic(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("degree {degree} exceeds the rational factorization bound {bound}")]
    DegreeBoundExceeded { degree: usize, bound: usize },
    #[error("zero binary form")]
    ZeroForm,
    #[error("matrix P is singular")]
    SingularP,
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("discriminant vanishes identically")]
    VanishingDiscriminant,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("characteristic two is not supported here")]
    CharTwo,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("element is not a unit")]
    NonUnit,
    #[error("binary form does not define the given scheme")]
    SchemeMismatch,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("convention check failed: {0}")]
    ConventionFailure(String),
    #[error("leading coefficient must be {0}")]
    LeadingCoefficientMismatch(String),
    #[error("coefficient convention violated: {0}")]
    CoefficientConventionViolated(String),
    #[error("(u, v) = (0, 0) is not a point")]
    ZeroPoint,
    #[error("point is not rational: {0}")]
    NonRationalPoint(String),
    #[error("pencil is not free")]
    NotFree,
    #[error("instance too large: {0}")]
    InstanceTooLarge(String),
    #[error("work {needed} exceeds budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroInversion => "ZeroInversion",
            Error::ZeroInput => "ZeroInput",
            Error::WrongCharacteristic(_) => "WrongCharacteristic",
            Error::NotPrime(_) => "NotPrime",
            Error::InvalidModulus(_) => "InvalidModulus",
            Error::ZeroPolynomial => "ZeroPolynomial",
            Error::DegreeBoundExceeded { .. } => "DegreeBoundExceeded",
            Error::ZeroForm => "ZeroForm",
            Error::SingularP => "SingularP",
            Error::SizeMismatch(_) => "SizeMismatch",
            Error::VanishingDiscriminant => "VanishingDiscriminant",
            Error::SingularMatrix => "SingularMatrix",
            Error::CharTwo => "CharTwo",
            Error::Unsupported(_) => "Unsupported",
            Error::NonUnit => "NonUnit",
            Error::SchemeMismatch => "SchemeMismatch",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::ConventionFailure(_) => "ConventionFailure",
            Error::LeadingCoefficientMismatch(_) => "LeadingCoefficientMismatch",
            Error::CoefficientConventionViolated(_) => "CoefficientConventionViolated",
            Error::ZeroPoint => "ZeroPoint",
            Error::NonRationalPoint(_) => "NonRationalPoint",
            Error::NotFree => "NotFree",
            Error::InstanceTooLarge(_) => "InstanceTooLarge",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::Parse(_) => "Parse",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Unsupported(_) | Error::BudgetExceeded { .. } | Error::InstanceTooLarge(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
