//! JSON report files, written atomically.

use std::path::Path;

use serde::Serialize;

use crate::{AppError, AppResult};

/// Version stamp embedded in every report and sidecar this binary writes.
pub const SCHEMA_VERSION: u32 = 1;

/// Serializes `value` as pretty JSON and writes it atomically, so a
/// crashed run never leaves a truncated report behind.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> AppResult<()> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| AppError::runtime(format!("cannot encode {}: {e}", path.display())))?;
    bytes.push(b'\n');
    noiseparity::atomic_write_bytes(path, &bytes)?;
    Ok(())
}
