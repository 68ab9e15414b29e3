use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("metric space must contain at least one point")]
    EmptySpace,
    #[error("point cloud contains no points")]
    EmptyCloud,
    #[error("invalid dimension {0}")]
    InvalidDimension(usize),
    #[error("point {index} has {found} coordinates, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("{labels} labels given for {points} points")]
    LabelCountMismatch { labels: usize, points: usize },
    #[error("label {0:?} appears more than once")]
    DuplicateLabel(String),
    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("points {first} and {second} coincide")]
    DuplicatePoint { first: usize, second: usize },
    #[error("row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("distance matrix is asymmetric at ({row}, {col})")]
    AsymmetricInput { row: usize, col: usize },
    #[error("diagonal entry {index} is not zero")]
    NonzeroDiagonal { index: usize },
    #[error("off-diagonal distance at ({row}, {col}) is not positive")]
    NonPositiveDistance { row: usize, col: usize },
    #[error("index {index} out of range for a space of {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("point {index} is at distance zero from the base point")]
    ZeroBaseDistance { index: usize },
    #[error("five-point inequality scan needs at least five points, got {0}")]
    FewerThanFivePoints(usize),
    #[error("point {index} lies on the sampled boundary")]
    PointOnBoundary { index: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite input")]
    NonFiniteInput,
    #[error("inversion base point is the origin")]
    BaseAtOrigin,
    #[error("inversion base point has norm {norm}, must be < 1")]
    BaseOutsideBall { norm: f64 },
    #[error("input coincides with the inversion pole")]
    PoleInput,
    #[error("matrix is not orthogonal (max |QᵀQ - I| = {deviation:e})")]
    NotOrthogonal { deviation: f64 },
    #[error("pair {pair} has a point at the puncture")]
    PointAtPuncture { pair: usize },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptySpace => "EmptySpace",
            Error::EmptyCloud => "EmptyCloud",
            Error::InvalidDimension(_) => "InvalidDimension",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::LabelCountMismatch { .. } => "LabelCountMismatch",
            Error::DuplicateLabel(_) => "DuplicateLabel",
            Error::NonFinite { .. } => "NonFinite",
            Error::DuplicatePoint { .. } => "DuplicatePoint",
            Error::NotSquare { .. } => "NotSquare",
            Error::AsymmetricInput { .. } => "AsymmetricInput",
            Error::NonzeroDiagonal { .. } => "NonzeroDiagonal",
            Error::NonPositiveDistance { .. } => "NonPositiveDistance",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::ZeroBaseDistance { .. } => "ZeroBaseDistance",
            Error::FewerThanFivePoints(_) => "FewerThanFivePoints",
            Error::PointOnBoundary { .. } => "PointOnBoundary",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::NonFiniteInput => "NonFiniteInput",
            Error::BaseAtOrigin => "BaseAtOrigin",
            Error::BaseOutsideBall { .. } => "BaseOutsideBall",
            Error::PoleInput => "PoleInput",
            Error::NotOrthogonal { .. } => "NotOrthogonal",
            Error::PointAtPuncture { .. } => "PointAtPuncture",
            Error::Parse { .. } => "ParseError",
            Error::Io(_) => "Io",
        }
    }
}
