//! Command-line front end: JSON experiment manifests in, deterministic
//! report.json + data.csv out, with run-dependent provenance quarantined to
//! its own file.

pub mod accept;
pub mod manifest;
pub mod report;
pub mod runners;

/// Errors that map to nonzero exit codes (statistical failures are verdicts,
/// not errors: they exit 1 with artifacts written).
#[derive(Clone, Debug)]
pub enum CliError {
    /// Usage or configuration problem → exit 2.
    Config(String),
    /// Numerical failure (collapse, non-convergence, sampling) → exit 3.
    Numerical(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numerical(_) => "numerical",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numerical(m) => m,
        }
    }
}
