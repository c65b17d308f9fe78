use compacton::Error;

/// Invalid input: bad flags, parameters or files.
pub const EXIT_INPUT: u8 = 2;
/// The computation itself failed, e.g. the integrator gave up.
pub const EXIT_RUNTIME: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub msg: String,
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, msg: msg.into() }
    }

    pub fn runtime(msg: impl Into<String>) -> Self {
        Self { code: EXIT_RUNTIME, msg: msg.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Inversion(_)
            | Error::Truncation(_)
            | Error::StepUnderflow { .. }
            | Error::NonFinite { .. }
            | Error::Linear(_)
            | Error::Io(_) => Self::runtime(e.to_string()),
            _ => Self::input(e.to_string()),
        }
    }
}
