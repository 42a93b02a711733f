use thiserror::Error;

use crate::blackbox::Label;

/// Errors raised by the library-level wrappers. The raw gate itself never
/// fails: invalid inputs are reported through its error bit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("label {0} is not a valid group element")]
    InvalidLabel(Label),
    #[error("label value {value:#x} does not fit in {width} bits")]
    LabelOutOfRange { value: u32, width: u8 },
    #[error("label width {0} is outside the supported range 1..=12")]
    UnsupportedWidth(u8),
    #[error("label width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: u8, found: u8 },
    #[error("size exceeds the cap of {cap}")]
    CapExceeded { cap: usize },
    #[error("generator list is empty")]
    EmptyGenerators,
    #[error("malformed straight-line program: {0}")]
    MalformedProgram(&'static str),
    #[error("invalid group description: {0}")]
    InvalidGroup(&'static str),
    #[error("certificate is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("register S is not in its initial state")]
    SNotInitialized,
    #[error("epsilon {epsilon} outside [0, 1/|H|) for |H| = {order}")]
    EpsilonOutOfRange { epsilon: f64, order: usize },
    #[error("sampler specification does not match the generated subgroup")]
    FSpecMismatch,
    #[error("candidate {0} is not a member of the sampler's subgroup")]
    NotMember(Label),
    #[error("expected {expected} certificates, got {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("state layouts differ")]
    LayoutMismatch,
    #[error("{what} must be at least {min}")]
    TooSmall { what: &'static str, min: u64 },
    #[error("no prime window exists for n = {0}")]
    NoPrimeWindow(u8),
}

pub type Result<T> = core::result::Result<T, Error>;
