//! Process exit codes.

use std::process::ExitCode;

use annulus_rk::Error;

pub const SUCCESS: u8 = 0;
pub const VERIFY_FAILED: u8 = 1;
pub const INVALID: u8 = 2;
pub const CONVERGENCE: u8 = 3;
pub const UNSUPPORTED: u8 = 4;

/// A failed command with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self { code: INVALID, message: message.into() }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Convergence(_) | Error::Quadrature { .. } => CONVERGENCE,
            Error::UnsupportedPath(_) => UNSUPPORTED,
            _ => INVALID,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::invalid(format!("I/O error: {e}"))
    }
}
