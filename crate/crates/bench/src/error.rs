use thiserror::Error;

pub type Result<T, E = BenchError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dataset unavailable: {0}")]
    DatasetUnavailable(String),

    #[error("numerical failure: {0}")]
    Numerical(#[from] qzcpd::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl BenchError {
    /// Process exit code reported by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 2,
            BenchError::DatasetUnavailable(_) => 3,
            BenchError::Numerical(_) => 4,
            BenchError::Io(_) | BenchError::Csv(_) => 1,
        }
    }
}

pub(crate) fn config(msg: impl Into<String>) -> BenchError {
    BenchError::Config(msg.into())
}

/// Short machine-readable tag for a decomposition failure, used in the
/// `status` column of per-trial records.
pub fn failure_tag(e: &qzcpd::Error) -> &'static str {
    use qzcpd::Error as E;
    match e {
        E::RealPencilComplexEigenvalues { .. } => "complex_eigenvalues",
        E::QzNoConvergence { .. } => "qz_no_convergence",
        E::SingularPencil { .. } => "singular_pencil",
        E::SvdNoConvergence => "svd_no_convergence",
        E::RankDeficient { .. } => "rank_deficient",
        E::DegenerateHigherFactors => "degenerate_higher_factors",
        E::SingularPivotFactor { .. } => "singular_pivot_factor",
        E::NotEnoughSlices { .. } => "not_enough_slices",
        E::ZeroInput => "zero_input",
        E::ZeroColumn { .. } => "zero_column",
        _ => "error",
    }
}
