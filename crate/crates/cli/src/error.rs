use std::fmt;

/// Failure classes with their stable exit codes.
#[derive(Debug)]
pub enum CliError {
    /// A check ran and did not pass (exit 1).
    Failed(String),
    /// Bad arguments or configuration (exit 2).
    Usage(String),
    /// Evaluation at a pole or another excluded point (exit 3).
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Failed(m) => write!(f, "verification failed: {m}"),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(m) => write!(f, "domain error: {m}"),
        }
    }
}

impl From<ek_core::Error> for CliError {
    fn from(e: ek_core::Error) -> Self {
        use ek_core::Error as E;
        if e.is_domain_error() {
            CliError::Domain(e.to_string())
        } else {
            match e {
                E::InvalidArgument(_) | E::DegenerateLattice => CliError::Usage(e.to_string()),
                _ => CliError::Failed(e.to_string()),
            }
        }
    }
}
