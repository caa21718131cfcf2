use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected a tensor of order {expected}, found order {found}")]
    OrderMismatch { expected: usize, found: usize },

    #[error("mode {mode} is out of range for a tensor of order {order}")]
    BadMode { mode: usize, order: usize },

    #[error("row and column mode lists do not partition the modes of an order-{order} tensor")]
    BadModePartition { order: usize },

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("index {index} is out of range for extent {extent}")]
    BadIndex { index: usize, extent: usize },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("operands live in different scalar fields")]
    FieldMismatch,

    #[error("column {column} of factor {factor} is identically zero")]
    ZeroColumn { factor: usize, column: usize },

    #[error(
        "real pencil has a complex conjugate eigenvalue pair in the 2x2 diagonal block at ({index}, {index})"
    )]
    RealPencilComplexEigenvalues { index: usize },

    #[error("QZ iteration did not converge after {iterations} sweeps")]
    QzNoConvergence { iterations: usize },

    #[error("singular pencil: alpha and beta both vanish at diagonal position {index}")]
    SingularPencil { index: usize },

    #[error("SVD did not converge")]
    SvdNoConvergence,

    #[error("input is identically zero")]
    ZeroInput,

    #[error("matrix is rank deficient (sigma_min = {sigma_min:e}, sigma_max = {sigma_max:e})")]
    RankDeficient { sigma_min: f64, sigma_max: f64 },

    #[error("Khatri-Rao product of the higher-order factors is rank deficient")]
    DegenerateHigherFactors,

    #[error("pivot factor for mode {mode} is singular")]
    SingularPivotFactor { mode: usize },

    #[error("pencil selection needs at least two slices, found {found}")]
    NotEnoughSlices { found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimMismatch(msg.into())
    }
}
