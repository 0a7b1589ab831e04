use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("subgroup of size 2^{log_size} not supported (2-adicity is {two_adicity})")]
    UnsupportedDomain { log_size: u32, two_adicity: u32 },
    #[error("cannot invert zero at index {index}")]
    ZeroInverse { index: usize },
    #[error("degree {degree} exceeds bound {bound}")]
    DegreeTooLarge { degree: usize, bound: usize },
    #[error("generator does not have order {expected}")]
    GeneratorOrder { expected: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("constraint expects {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("field of size {modulus} too small for degree {degree}")]
    UnsupportedField { modulus: u64, degree: usize },
    #[error("schedule covers {covered} variables, need {needed}")]
    ScheduleTooShort { covered: u32, needed: u32 },
    #[error("prover input is inconsistent: {0}")]
    DishonestInput(String),
    #[error("unknown constraint '{0}'")]
    UnknownConstraint(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
