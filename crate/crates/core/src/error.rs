use thiserror::Error;

pub type Result<T> = std::result::Result<T, TautError>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TautError {
    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("unstable divisor {0}: the class is zero by convention")]
    UnstableDivisor(String),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("label `{0}` already present")]
    LabelCollision(String),

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("degree error: {0}")]
    Degree(String),

    #[error("unsupported genus {0} (supported range is 0..=2)")]
    UnsupportedGenus(u32),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("unresolved decoration `{0}`: its class is not known in this position")]
    UnresolvedDecoration(String),

    #[error("target space of the forgetful map is unstable: {0}")]
    UnstableTarget(String),

    #[error("no generator formula registered for {0}")]
    NoGeneratorFormula(String),

    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("malformed structured input: {0}")]
    Json(String),
}

impl TautError {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            TautError::Syntax { .. } | TautError::UnknownLabel(_) | TautError::Json(_) => 2,
            TautError::NoGeneratorFormula(_) => 2,
            TautError::InvalidSpace(_)
            | TautError::SpaceMismatch(_)
            | TautError::Degree(_)
            | TautError::LabelCollision(_)
            | TautError::UnstableTarget(_)
            | TautError::UnstableDivisor(_) => 3,
            TautError::UnsupportedGenus(_)
            | TautError::Unsupported(_)
            | TautError::UnresolvedDecoration(_) => 5,
        }
    }
}
