use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad or unreadable configuration, or an output location that cannot be used.
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// A computation failed after the configuration was accepted.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Output { .. } => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<kernspec::kernelmodel::KernelError> for CliError {
    fn from(e: kernspec::kernelmodel::KernelError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<kernspec::bounds::BoundsError> for CliError {
    fn from(e: kernspec::bounds::BoundsError) -> Self {
        match e {
            kernspec::bounds::BoundsError::Constraint(m) => CliError::Config(m),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<kernspec::experiments::ExperimentError> for CliError {
    fn from(e: kernspec::experiments::ExperimentError) -> Self {
        use kernspec::experiments::ExperimentError;
        match e {
            ExperimentError::Constraint(m) => CliError::Config(m),
            ExperimentError::Bounds(b) => b.into(),
            other => CliError::Numerical(other.to_string()),
        }
    }
}
