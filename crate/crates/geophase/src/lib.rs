//! File formats, configuration and command implementations behind the
//! `geophase` binary.

pub mod commands;
pub mod config;
pub mod output;

use thiserror::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("I/O error: {0}")]
    Io(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] geophase_core::Error),
}

impl CliError {
    /// Process exit status: 1 I/O, 2 configuration, 3 domain,
    /// 4 resolution or singularity.
    pub fn exit_code(&self) -> u8 {
        use geophase_core::Error as E;
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Core(E::Domain(_) | E::DegenerateDraw(_)) => 3,
            CliError::Core(E::Resolution { .. } | E::Singularity(_) | E::Unobservable(_)) => 4,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
