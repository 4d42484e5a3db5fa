use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("recomposition failed: sum of omega_J ^ eta^J differs from p_k(rho) by {0}")]
    RecompositionFailure(String),
    #[error("integration-by-parts expansion mismatch: residue {0}")]
    ExpansionMismatch(String),
    #[error("form is not 1-contact")]
    NotOneContact,
    #[error("form has no single horizontal degree")]
    NotHomogeneous,
    #[error("form degree {degree} exceeds n+1 = {max}")]
    DegreeTooHigh { degree: usize, max: usize },
    #[error("unsupported case: {0}")]
    UnsupportedCase(String),
    #[error("unsupported Lagrangian order {0} (expected 1 or 2)")]
    UnsupportedOrder(usize),
    #[error("syntax error at line {line}, column {column}: {message}")]
    SyntaxError {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("coordinate {coord} exceeds the declared order {order}")]
    OrderViolation { coord: String, order: usize },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
}

pub type Result<T> = std::result::Result<T, JetError>;
