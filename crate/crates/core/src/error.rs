use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("insufficient jet order: need {needed}, field supplies {available}")]
    InsufficientOrder { needed: usize, available: usize },

    #[error("chart mismatch: {0}")]
    ChartMismatch(String),

    #[error("degree overflow: {lhs} + {rhs} exceeds dimension {dim}")]
    DegreeOverflow { lhs: usize, rhs: usize, dim: usize },

    #[error("expected a {expected}-form, got degree {found}")]
    WrongDegree { expected: usize, found: usize },

    #[error("point outside model domain: {0}")]
    OutsideDomain(String),

    #[error("singular matrix in {0}")]
    Singular(&'static str),

    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),

    #[error("evaluation domain violation: {0}")]
    DomainViolation(String),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("function `{name}` takes 1 argument, got {found} (byte {offset})")]
    Arity {
        name: String,
        found: usize,
        offset: usize,
    },

    #[error("variable `{0}` is not available in this context")]
    UnboundVariable(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("I/O failure: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
