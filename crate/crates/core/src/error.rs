use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("residue characteristic must be odd, got p = 2")]
    EvenPrime,
    #[error("family z:<p>:<r> requires s = 1, got s = {0}")]
    BadFamilyCombo(u32),
    #[error("invalid ring parameter: {0}")]
    InvalidParameter(String),
    #[error("ring of size {size} exceeds the configured cap of {cap}")]
    RingTooLarge { size: u64, cap: u64 },
    #[error("operands belong to different rings")]
    RingMismatch,
    #[error("element index {index} out of range for ring of size {size}")]
    ElementOutOfRange { index: u64, size: u32 },
    #[error("element {0} is not a unit")]
    NotAUnit(u32),
    #[error("arity n = {n} outside the allowed range [{min}, {max}]")]
    BadArity { n: usize, min: usize, max: usize },
    #[error("set contains non-unit elements")]
    NotUnits,
    #[error("every coordinate lies in the maximal ideal; the tuple has no class")]
    AllNonUnits,
    #[error("tuple has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{what}: {count} exceeds the configured cap of {cap}")]
    TooLarge { what: &'static str, count: u128, cap: u128 },
    #[error("graph with {vertices} vertices exceeds the spectral cap of {cap}")]
    TooLargeForSpectrum { vertices: usize, cap: usize },
    #[error("vertex index {index} out of range for {len} vertices")]
    BadIndex { index: usize, len: usize },
    #[error("embedding collision: {params} parameter tuples produced only {classes} distinct classes")]
    EmbeddingCollision { params: u128, classes: u128 },
    #[error("target size {k} outside [1, {max}]")]
    BadSize { k: usize, max: usize },
    #[error("closed-form mismatch: {0}")]
    FormulaMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("{0} has even characteristic")]
    EvenCharacteristic(u64),
}

impl Error {
    /// Stable machine-readable name used in JSON error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPrime(_) => "NonPrime",
            Error::EvenPrime => "EvenPrime",
            Error::BadFamilyCombo(_) => "BadFamilyCombo",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::RingTooLarge { .. } => "RingTooLarge",
            Error::RingMismatch => "RingMismatch",
            Error::ElementOutOfRange { .. } => "ElementOutOfRange",
            Error::NotAUnit(_) => "NotAUnit",
            Error::BadArity { .. } => "BadArity",
            Error::NotUnits => "NotUnits",
            Error::AllNonUnits => "AllNonUnits",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::TooLarge { .. } => "TooLarge",
            Error::TooLargeForSpectrum { .. } => "TooLargeForSpectrum",
            Error::BadIndex { .. } => "BadIndex",
            Error::EmbeddingCollision { .. } => "EmbeddingCollision",
            Error::BadSize { .. } => "BadSize",
            Error::FormulaMismatch(_) => "FormulaMismatch",
            Error::Parse(_) => "ParseError",
            Error::NotPrimePower(_) => "NotPrimePower",
            Error::EvenCharacteristic(_) => "EvenCharacteristic",
        }
    }
}
