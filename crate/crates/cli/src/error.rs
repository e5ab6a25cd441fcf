use std::path::PathBuf;

/// Everything the command line can fail with.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid state file: {0}")]
    Format(String),
    #[error("matrix is not Hermitian: max |A_jk - conj(A_kj)| = {deviation:e} exceeds 1e-9")]
    NonHermitian { deviation: f64 },
    #[error("matrix has eigenvalue {value:e} below -1e-9")]
    NegativeEigenvalue { value: f64 },
    #[error("trace {value} differs from 1 by more than 1e-6")]
    Trace { value: f64 },
    #[error("cannot write output: {0}")]
    Output(std::io::Error),
    #[error(transparent)]
    Core(#[from] qbound::Error),
}

impl CliError {
    /// Process exit status.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Core(qbound::Error::ResourceLimit { .. }) => 3,
            Self::Core(qbound::Error::NonConvergence { .. }) => 1,
            Self::Output(_) => 1,
            _ => 2,
        }
    }

    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Self::Io { .. } => "io_error",
            Self::Json { .. } => "malformed_json",
            Self::Format(_) => "invalid_state",
            Self::NonHermitian { .. } => "non_hermitian",
            Self::NegativeEigenvalue { .. } => "negative_eigenvalue",
            Self::Trace { .. } => "bad_trace",
            Self::Output(_) => "output_error",
            Self::Core(e) => match e {
                qbound::Error::ResourceLimit { .. } => "resource_limit",
                qbound::Error::NonConvergence { .. } => "non_convergence",
                qbound::Error::DimensionMismatch(..) => "dimension_mismatch",
                qbound::Error::OutOfRange { .. } => "out_of_range",
                qbound::Error::OrthogonalSupports => "orthogonal_supports",
                qbound::Error::SupportViolation(_) => "support_violation",
                qbound::Error::Degenerate(_) => "degenerate",
                qbound::Error::InvalidInput(_) => "invalid_input",
            },
        }
    }
}
