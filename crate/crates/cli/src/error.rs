use exterior_wave::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{stage}: {source}")]
    Run { stage: &'static str, source: Error },
    /// A diagnostic ran but missed its tolerance.
    #[error("check failed: {0}")]
    Check(String),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn run(stage: &'static str) -> impl FnOnce(Error) -> CliError {
        move |source| CliError::Run { stage, source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Run { source, .. } if matches!(source.root(), Error::TruncationUnsafe { .. }) => 3,
            Self::Run { source, .. } if matches!(source.root(), Error::InvalidGrid(_) | Error::InvalidArgument(_)) => 2,
            Self::Run { .. } | Self::Check(_) | Self::Io(_) => 1,
        }
    }
}
