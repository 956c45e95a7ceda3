use thiserror::Error;

/// Errors raised by the algebra routines.
///
/// Every variant maps to a short, stable code (see [`Error::code`]) that the
/// command-line front end prints as `error: <code>: <detail>`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(String, String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("degree {0} exceeds the supported maximum {1}")]
    DegreeTooLarge(usize, usize),
    #[error("zero polynomial has no leading monomial")]
    ZeroPolynomial,
    #[error("division by zero")]
    DivisionByZero,
    #[error("variable {0} is outside the alphabet")]
    VariableOutOfRange(String),
    #[error("support budget of {0} terms exceeded")]
    BudgetExceeded(usize),
    #[error("degree bound {0} exceeded")]
    DegreeBoundExceeded(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("factor is a unit: {0}")]
    UnitFactor(String),
    #[error("product mismatch: {0}")]
    ProductMismatch(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    /// Machine-parsable error code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::FieldMismatch(..) => "field-mismatch",
            Error::AlphabetMismatch(..) => "alphabet-mismatch",
            Error::DimensionMismatch(_) => "dimension-mismatch",
            Error::NotSquare { .. } => "not-square",
            Error::DegreeTooLarge(..) => "degree-too-large",
            Error::ZeroPolynomial => "zero-polynomial",
            Error::DivisionByZero => "division-by-zero",
            Error::VariableOutOfRange(_) => "variable-out-of-range",
            Error::BudgetExceeded(_) => "budget-exceeded",
            Error::DegreeBoundExceeded(_) => "degree-bound-exceeded",
            Error::Precondition(_) => "precondition",
            Error::UnsupportedField(_) => "unsupported-field",
            Error::UnitFactor(_) => "unit-factor",
            Error::ProductMismatch(_) => "product-mismatch",
            Error::Parse { .. } => "parse",
        }
    }

    /// True for malformed-input errors, as opposed to domain errors.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. })
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
