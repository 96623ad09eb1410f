use std::fmt;
use std::path::Path;

use xel_core::rank::EmbedError;
use xel_core::search::{GenError, ProviderError};

pub const DATA: u8 = 1;
pub const USAGE: u8 = 2;
pub const TRANSIENT: u8 = 3;

/// Bad invocation: missing inputs, unknown selectors, conflicting options.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(message: impl Into<String>) -> anyhow::Error {
    UsageError(message.into()).into()
}

/// The path, if it exists; a usage error otherwise.
pub fn existing<'p>(path: Option<&'p Path>, flag: &str) -> anyhow::Result<&'p Path> {
    match path {
        None => Err(usage(format!("{flag} is required"))),
        Some(p) if !p.exists() => Err(usage(format!("{flag}: {} does not exist", p.display()))),
        Some(p) => Ok(p),
    }
}

/// Map an error chain to a process exit code. Anything not recognized as a
/// usage or transient failure is a data error.
pub fn classify(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return USAGE;
        }
        if let Some(e) = cause.downcast_ref::<GenError>() {
            return match e {
                GenError::MissingCountry => USAGE,
                GenError::AllProvidersFailed(_) => TRANSIENT,
            };
        }
        if let Some(ProviderError::Transient { .. }) = cause.downcast_ref::<ProviderError>() {
            return TRANSIENT;
        }
        if let Some(EmbedError::Unavailable(_)) = cause.downcast_ref::<EmbedError>() {
            return TRANSIENT;
        }
    }
    DATA
}
