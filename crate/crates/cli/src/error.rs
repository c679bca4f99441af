use std::io;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const BLOW_UP: i32 = 3;
    pub const NOT_FOUND: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] pnpm_core::Error),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn io(context: impl Into<String>, source: io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        use pnpm_core::Error as E;
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Core(
                E::BlowUp { .. } | E::NonFinite { .. } | E::InadmissibleState { .. },
            ) => exit::BLOW_UP,
            CliError::Core(
                E::InvalidDegrees { .. }
                | E::UnsupportedFlux { .. }
                | E::InvalidGrid(_)
                | E::InvalidConfig(_)
                | E::TooFewGrids(_),
            ) => exit::CONFIG,
            _ => exit::FAILURE,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pnpm_core::Error as E;

    #[test]
    fn exit_codes() {
        let blow_up = CliError::from(E::BlowUp {
            t: 0.1,
            norm: 1e9,
            limit: 1e6,
        });
        assert_eq!(blow_up.exit_code(), exit::BLOW_UP);
        assert_eq!(
            CliError::from(E::NonFinite { cell: 2 }).exit_code(),
            exit::BLOW_UP
        );
        assert_eq!(
            CliError::from(E::InvalidDegrees { n: 1, m: 9 }).exit_code(),
            exit::CONFIG
        );
        assert_eq!(CliError::Config("x".into()).exit_code(), exit::CONFIG);
        assert_eq!(
            CliError::from(E::SingularSystem { ratio: 1e-16 }).exit_code(),
            exit::FAILURE
        );
        let io = CliError::io("writing out", io::Error::other("disk full"));
        assert_eq!(io.exit_code(), exit::FAILURE);
        assert_eq!(io.to_string(), "writing out: disk full");
    }
}
