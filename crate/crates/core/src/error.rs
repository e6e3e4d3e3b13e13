use alloc::string::String;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the operation's domain.
    InvalidParameter(String),
    /// Input data (samples, profiles) violate a precondition.
    InvalidInput(String),
    /// A numerical procedure did not produce an acceptable answer.
    Numerical(String),
    /// A required upstream result is missing or inconsistent.
    Dependency(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(m) => write!(f, "invalid parameter: {m}"),
            Error::InvalidInput(m) => write!(f, "invalid input: {m}"),
            Error::Numerical(m) => write!(f, "numerical failure: {m}"),
            Error::Dependency(m) => write!(f, "dependency error: {m}"),
        }
    }
}

impl core::error::Error for Error {}

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$kind(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
