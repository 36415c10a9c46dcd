use std::fmt;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NO_CHEILLINI: u8 = 3;
pub const EXIT_DOMAIN: u8 = 4;
pub const EXIT_BLOW_UP: u8 = 5;

/// An error carrying the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(EXIT_CONFIG, message)
    }

    pub fn no_cheillini() -> Self {
        Self::new(EXIT_NO_CHEILLINI, "no Cheillini solution")
    }

    pub fn io(e: impl fmt::Display) -> Self {
        Self::config(format!("io: {e}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<nsl_core::Error> for CliError {
    fn from(e: nsl_core::Error) -> Self {
        use nsl_core::Error as E;
        let code = match &e {
            E::Domain(_) | E::EmptyDomain { .. } | E::OutsideBranchDomain { .. } | E::BranchNotFound { .. } => {
                EXIT_DOMAIN
            }
            E::NonFiniteState { .. } => EXIT_BLOW_UP,
            E::NotMonomialDamping => EXIT_NO_CHEILLINI,
            E::ClosedFormMismatch(_) => EXIT_VERIFY,
            _ => EXIT_CONFIG,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::io(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::io(e)
    }
}
