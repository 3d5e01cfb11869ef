use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("NaN is not an extended real")]
    NotANumber,

    #[error("invalid carrier: {0}")]
    InvalidCarrier(String),

    #[error("set does not belong to this carrier: {0}")]
    ForeignSet(String),

    #[error("operation requires a {expected} carrier")]
    WrongCarrierKind { expected: &'static str },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid charge: {0}")]
    InvalidCharge(String),

    #[error("charge must be nonnegative (point {point} has mass {mass})")]
    SignedCharge { point: usize, mass: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no conjugate available for {0}")]
    ConjugateUnavailable(String),

    #[error("integrand {0} is not radial")]
    NotRadial(String),

    #[error("grid function has no finite value")]
    AllInfinite,

    #[error("unsupported integrand for this operation: {0}")]
    Unsupported(String),

    #[error("probe set does not span the test space (rank {rank} of {needed})")]
    NonSpanning { rank: usize, needed: usize },

    #[error("malformed input: {0}")]
    Parse(String),
}
