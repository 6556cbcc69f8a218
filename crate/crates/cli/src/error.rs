use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("input file error: {0}")]
    Input(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Input(_) => 3,
            CliError::Consistency(_) => 4,
        }
    }
}

impl From<qstw_core::Error> for CliError {
    fn from(e: qstw_core::Error) -> Self {
        CliError::Consistency(e.to_string())
    }
}
