//! Batch front-end for `nslab`: simulate, verify, epochs, converge and
//! constant estimation, writing CSV/JSON artifacts and a run manifest.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 blow-up,
//! 3 estimate contradiction or failed check.

pub mod commands;
pub mod config;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_BLOWUP: u8 = 2;
pub const EXIT_CONTRADICTION: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] nslab::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(nslab::Error::PigeonholeContradiction { .. }) => EXIT_CONTRADICTION,
            CliError::Core(nslab::Error::NonFinite { .. }) => EXIT_BLOWUP,
            _ => EXIT_USAGE,
        }
    }
}
