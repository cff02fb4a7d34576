use hvforge_core::Error as CoreError;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const STATISTICAL_FLAG: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const GEOMETRY: i32 = 3;
    pub const NOT_A_SYMMETRY: i32 = 4;
    pub const NOT_REPRESENTABLE: i32 = 5;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn parse(msg: impl Into<String>) -> Self {
        CliError::Parse(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io { .. } | CliError::Json { .. } => exit::PARSE,
            CliError::Core(e) => match e {
                CoreError::NotASymmetry => exit::NOT_A_SYMMETRY,
                CoreError::NotRepresentable => exit::NOT_REPRESENTABLE,
                CoreError::InvalidDimension(_)
                | CoreError::InvalidState(_)
                | CoreError::InvalidInput(_)
                | CoreError::InvalidMeasurement(_) => exit::PARSE,
                CoreError::Unbounded { .. }
                | CoreError::Degenerate(_)
                | CoreError::InvalidVertex(_)
                | CoreError::WitnessNotApplicable(_) => exit::GEOMETRY,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
