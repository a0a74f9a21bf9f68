//! Report destinations and atomic file writes.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

/// Directory used for reports when no `--output` is given.
pub const OUT_DIR_VAR: &str = "KAHLER_LIFT_OUT_DIR";

/// Where output goes: an explicit path, `$KAHLER_LIFT_OUT_DIR/<default_name>`, or stdout.
pub fn destination(explicit: Option<&Path>, default_name: &str) -> Option<PathBuf> {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_DIR_VAR).filter(|d| !d.is_empty()).map(|d| PathBuf::from(d).join(default_name)))
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn emit(explicit: Option<&Path>, default_name: &str, bytes: &[u8]) -> io::Result<()> {
    match destination(explicit, default_name) {
        Some(p) => write_atomic(&p, bytes),
        None => io::stdout().lock().write_all(bytes),
    }
}
