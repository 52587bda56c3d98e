use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] qchaos::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// Configuration and size problems map to exit code 2.
    pub fn is_config_or_size(&self) -> bool {
        matches!(
            self,
            HarnessError::Config(_)
                | HarnessError::Core(
                    qchaos::Error::CapExceeded { .. }
                        | qchaos::Error::EnumerationCap { .. }
                        | qchaos::Error::InvalidQ(_)
                        | qchaos::Error::OutOfRange { .. }
                        | qchaos::Error::Hypothesis(_)
                )
        )
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
