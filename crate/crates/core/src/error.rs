use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("defining polynomial is not monic")]
    NotMonic,
    #[error("defining polynomial must have degree at least 2, got {0}")]
    DegreeTooSmall(usize),
    #[error("defining polynomial is not squarefree")]
    NotSquarefree,
    #[error("defining polynomial is reducible (factor {factor})")]
    IrreducibilityFailed { factor: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements belong to different number fields")]
    FieldMismatch,
    #[error("could not certify result at {bits} bits of working precision")]
    PrecisionExhausted { bits: u64 },
    #[error("element is not a unit")]
    NotAUnit,
    #[error("unit has finite order")]
    TorsionUnit,
    #[error("alpha is zero")]
    AlphaZero,
    #[error("alpha has degree {degree}, smaller than the field degree {field_degree}")]
    AlphaNotPrimitive { degree: usize, field_degree: usize },
    #[error("alpha*eps^{a} has degree {degree} < {field_degree}")]
    DegenerateDegree {
        a: i64,
        degree: usize,
        field_degree: usize,
    },
    #[error("window of length {got} is too short, need at least {needed}")]
    WindowTooShort { needed: usize, got: usize },
    #[error("no linear recurrence of order <= {max_order} certified by the window")]
    NoRecurrenceFound { max_order: usize },
    #[error("polynomial {0} is not irreducible over Q")]
    NotIrreducible(String),
    #[error("odd degree {0} is not supported by the dual construction")]
    OddDegreeUnsupported(usize),
    #[error("index h = {0} has no closed form")]
    UnsupportedIndex(usize),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

pub type Result<T> = std::result::Result<T, Error>;
