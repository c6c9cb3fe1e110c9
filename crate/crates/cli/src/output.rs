//! Output plumbing: 6-significant-digit float normalization (reruns must diff
//! byte-identically) and write-to-file-or-stdout.

use std::fs;
use std::path::{Path, PathBuf};

use crate::runs::CliError;

/// Round to 6 significant digits. All floats leave the binary through this,
/// so identical runs serialize identically and small last-ulp differences
/// cannot leak into diffs.
pub fn sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let mag = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(5 - mag);
    (x * scale).round() / scale
}

pub fn fmt(x: f64) -> String {
    format!("{}", sig6(x))
}

pub fn emit(out: &Option<PathBuf>, payload: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, payload),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

pub fn write_file(path: &Path, payload: &str) -> Result<(), CliError> {
    fs::write(path, payload)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}
