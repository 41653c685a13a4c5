use crate::rat::Rat;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("segment width must be positive, got {0}")]
    NonPositiveWidth(Rat),
    #[error("abscissa {x} outside [0, {width}]")]
    OutOfDomain { x: Rat, width: Rat },
    #[error("polygons are not comparable: {0}")]
    NotComparable(String),
    #[error("width mismatch: {0}")]
    WidthMismatch(String),
    #[error("polygon is not symmetric")]
    NotSymmetric,
    #[error("point ({x}, {y}) does not lie on the polygon")]
    NotOnPolygon { x: Rat, y: Rat },
    #[error("vertex list is not concave: {0}")]
    NotConcave(String),
    #[error("empty input")]
    EmptyInput,
    #[error("anchor inconsistent: {0}")]
    AnchorInconsistent(String),
    #[error("invalid slope multiset: {0}")]
    InvalidSlopes(String),
    #[error("invalid isocrystal: {0}")]
    InvalidIsocrystal(String),
    #[error("cannot split at ({x}, {y}): {reason}")]
    UnsplittableAt { x: Rat, y: Rat, reason: String },
    #[error("invalid group datum: {0}")]
    InvalidCase(String),
    #[error("invalid cocharacter: {0}")]
    InvalidMu(String),
    #[error("element is not a member of the list")]
    NotMember,
    #[error("enumeration cap exceeded: more than {0} Newton points")]
    SearchCapExceeded(usize),
    #[error("invalid subobject cloud: {0}")]
    InvalidCloud(String),
    #[error("divisibility violated: {0}")]
    DivisibilityViolated(String),
    #[error("incoherent torsion tower: {0}")]
    IncoherentTower(String),
    #[error("invalid differential divisors: {0}")]
    InvalidOmega(String),
    #[error("invalid filtered invariant: {0}")]
    InvalidInvariant(String),
    #[error("polygon-level admissibility conditions fail: {0}")]
    NotAdmissible(String),
    #[error("({x}, {y}) is not a detected contact pair")]
    NotContactPair { x: Rat, y: Rat },
    #[error("decomposition piece {index} fails admissibility: {reason}")]
    PieceNotAdmissible { index: usize, reason: String },
}

impl Error {
    /// Stable machine-readable code, used in CLI error payloads.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonPositiveWidth(_) => "NonPositiveWidth",
            Error::OutOfDomain { .. } => "OutOfDomain",
            Error::NotComparable(_) => "NotComparable",
            Error::WidthMismatch(_) => "WidthMismatch",
            Error::NotSymmetric => "NotSymmetric",
            Error::NotOnPolygon { .. } => "NotOnPolygon",
            Error::NotConcave(_) => "NotConcave",
            Error::EmptyInput => "EmptyInput",
            Error::AnchorInconsistent(_) => "AnchorInconsistent",
            Error::InvalidSlopes(_) => "InvalidSlopes",
            Error::InvalidIsocrystal(_) => "InvalidIsocrystal",
            Error::UnsplittableAt { .. } => "UnsplittableAt",
            Error::InvalidCase(_) => "InvalidCase",
            Error::InvalidMu(_) => "InvalidMu",
            Error::NotMember => "NotMember",
            Error::SearchCapExceeded(_) => "SearchCapExceeded",
            Error::InvalidCloud(_) => "InvalidCloud",
            Error::DivisibilityViolated(_) => "DivisibilityViolated",
            Error::IncoherentTower(_) => "IncoherentTower",
            Error::InvalidOmega(_) => "InvalidOmega",
            Error::InvalidInvariant(_) => "InvalidInvariant",
            Error::NotAdmissible(_) => "NotAdmissible",
            Error::NotContactPair { .. } => "NotContactPair",
            Error::PieceNotAdmissible { .. } => "PieceNotAdmissible",
        }
    }
}
