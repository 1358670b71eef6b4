use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Argument(String),
    #[error(transparent)]
    Core(#[from] heavyls::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type CliResult<T> = Result<T, CliError>;

pub fn bad_arg(msg: impl Into<String>) -> CliError {
    CliError::Argument(msg.into())
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_ARGUMENT: i32 = 1;
pub const EXIT_DEGRADED: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use heavyls::Error as E;
        match self {
            CliError::Core(E::Invariant(_)) => EXIT_INVARIANT,
            CliError::Core(E::Convergence(_) | E::Fit(_)) => EXIT_DEGRADED,
            _ => EXIT_ARGUMENT,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use heavyls::Error as E;

    #[test]
    fn exit_codes_follow_the_failure_kind() {
        assert_eq!(CliError::from(E::Invariant("slack".into())).exit_code(), EXIT_INVARIANT);
        assert_eq!(CliError::from(E::Convergence("cap".into())).exit_code(), EXIT_DEGRADED);
        assert_eq!(CliError::from(E::Argument("x".into())).exit_code(), EXIT_ARGUMENT);
        assert_eq!(bad_arg("y").exit_code(), EXIT_ARGUMENT);
    }
}
