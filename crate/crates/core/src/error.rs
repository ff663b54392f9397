use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid upper bound {upper} must exceed lower bound {lower}")]
    NonPositiveRange { lower: f64, upper: f64 },
    #[error("grid needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("mixture has no components")]
    EmptyMixture,
    #[error("parameter `{name}` must be positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("invalid sensitivity profile: {0}")]
    InvalidProfile(String),
    #[error("profiles or paths are defined on different grids")]
    GridMismatch,
    #[error("kernel matrix is not positive definite after jitter")]
    FactorizationFailure,
    #[error("profile has zero L2 norm")]
    DegenerateProfile,
    #[error("column `{0}` has zero sample variance")]
    DegenerateColumn(String),
    #[error("sample is empty")]
    EmptySample,
    #[error("vector has zero norm")]
    ZeroVector,
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("label sets do not match: {0}")]
    LabelMismatch(String),
    #[error("need at least {required} assets, got {found}")]
    TooFewAssets { required: usize, found: usize },
    #[error("need at least {required} permutations, got {found}")]
    TooFewPermutations { required: usize, found: usize },
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid distance matrix: {0}")]
    InvalidDistanceMatrix(String),
    #[error("silhouette needs at least two clusters")]
    SingleCluster,
    #[error("cluster {0} has no members")]
    EmptyCluster(usize),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("input contains no records")]
    EmptyInput,
    #[error("mean embedding of asset `{0}` has zero norm")]
    ZeroNormAggregate(String),
    #[error("missing value at row {row}, column `{column}`")]
    MissingValues { row: usize, column: String },
    #[error("column mismatch: {0}")]
    ColumnMismatch(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
