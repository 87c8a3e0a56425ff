//! File formats: JSON design and space files, measurement and sweep CSV,
//! and SVG electrode outlines.
//!
//! Emitted documents use SI field names only. Loaders additionally accept
//! the millimeter and kilovolt spellings listed per field; each quantity
//! must arrive in exactly one unit. Unknown fields are rejected so typos
//! fail loudly instead of silently falling back to defaults.

use std::path::Path;

use thiserror::Error;

mod blocks;
pub mod design_file;
pub mod measurements;
pub mod report;
pub mod space_file;
pub mod svg;
pub mod sweep;
mod units;

pub use design_file::DesignFile;
pub use report::AnalysisReport;
pub use space_file::SpaceFile;
pub use sweep::{ParetoRow, SweepRow, SweepSpec};

/// Version expected in every JSON document's `schema_version` field.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    /// The document parses as text but violates the format contract.
    #[error("schema error: {0}")]
    Schema(String),
    #[error("failed to read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    /// The request is well-formed but physically unachievable.
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// The data cannot support the requested computation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub fn read_file(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), IoError> {
    std::fs::write(path, contents).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}

pub(crate) fn check_schema_version(version: Option<u32>) -> Result<(), IoError> {
    match version {
        Some(SCHEMA_VERSION) => Ok(()),
        Some(other) => Err(IoError::Schema(format!(
            "unsupported schema_version {other}; this build reads version {SCHEMA_VERSION}"
        ))),
        None => Err(IoError::Schema(format!(
            "schema_version is required (currently {SCHEMA_VERSION})"
        ))),
    }
}
