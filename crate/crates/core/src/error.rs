use thiserror::Error;

/// Errors raised by field construction, builders, closures and the CLI.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus is reducible over F_{p}")]
    ReducibleModulus { p: u32 },
    #[error("modulus has degree {found}, expected monic of degree {expected}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("field of order {0} exceeds the supported size 2^15")]
    FieldTooLarge(u64),
    #[error("{d} does not divide the extension degree {m}")]
    NotADivisor { d: usize, m: usize },
    #[error("Artin-Schreier equation has no solution: relative trace is {trace} (key)")]
    NoSolution { trace: u32 },
    #[error("inconsistent parameters: {0}")]
    InconsistentParams(String),
    #[error("structure too large: {0}")]
    TooLarge(String),
    #[error("elements come from different fields")]
    FieldMismatch,
    #[error("cap of {cap} elements exceeded{}", context.as_ref().map(|c| format!(" ({c})")).unwrap_or_default())]
    CapExceeded { cap: usize, context: Option<String> },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("self-check failed: {0}")]
    SelfCheckFailed(String),
    #[error("parameter search failed: {0}")]
    NotFound(String),
    #[error("conjugate is not of the form (E(a,b,c,t), phi): {0}")]
    NotInModelForm(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

/// Exit codes of the command-line tool.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const CAP: i32 = 3;
}

impl Error {
    /// `3` for exceeded caps, `1` for failed properties, `2` otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded { .. } | Error::TooLarge(_) => exit::CAP,
            Error::SelfCheckFailed(_) | Error::NotFound(_) | Error::NotInModelForm(_) => exit::FAILURE,
            _ => exit::USAGE,
        }
    }

    pub(crate) fn cap(cap: usize, context: impl Into<String>) -> Self {
        Error::CapExceeded {
            cap,
            context: Some(context.into()),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
