//! Filesystem helpers shared by the file-format modules.

use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// Writes through a temporary file in the destination directory and renames,
/// so the destination either appears complete or not at all.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(parent) if !parent.as_os_str().is_empty() => parent,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
