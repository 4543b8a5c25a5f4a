use thiserror::Error;

/// Process exit codes.
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{0}")]
    Io(String),

    #[error(transparent)]
    Physics(#[from] subradiance::Error),

    #[error("{count} scan point(s) did not converge in the Fock truncation, first at {first}; no CSV written")]
    Unconverged { count: usize, first: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use subradiance::Error as E;
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Unconverged { .. } => EXIT_NOT_CONVERGED,
            CliError::Physics(e) => match e {
                E::NotConverged { .. }
                | E::SingularSteadyState { .. }
                | E::SteadyStateResidual { .. }
                | E::StepFailure { .. }
                | E::Defective { .. } => EXIT_NOT_CONVERGED,
                _ => EXIT_USAGE,
            },
        }
    }
}
