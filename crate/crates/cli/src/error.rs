//! Exit-code discipline: usage errors exit 2, everything else exits 1.

use std::fmt;

use absa_forge::ingest::IngestError;

pub type Result<T> = anyhow::Result<T>;

#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Prints the error chain to stderr, expanding aggregated per-line ingest
/// errors, and returns the process exit code.
pub fn report(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<UsageError>().is_some() {
        eprintln!("error: {err}");
        return 2;
    }
    eprintln!("error: {err:#}");
    if let Some(IngestError::Lines(lines)) = err.chain().find_map(|e| e.downcast_ref::<IngestError>()) {
        for line in lines {
            eprintln!("  {line}");
        }
    }
    1
}
