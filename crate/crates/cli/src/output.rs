use std::env;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::{Failure, Format, OutputArgs};

pub const OUT_DIR_VAR: &str = "XMARKET_OUT_DIR";

/// Relative paths are taken under `$XMARKET_OUT_DIR` when it is set.
pub fn resolve(path: &Path) -> PathBuf {
    match env::var_os(OUT_DIR_VAR) {
        Some(dir) if path.is_relative() && !dir.is_empty() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

pub fn default_dir() -> Option<PathBuf> {
    env::var_os(OUT_DIR_VAR).filter(|d| !d.is_empty()).map(PathBuf::from)
}

pub fn write_file(path: &Path, body: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| io_failure(parent, e))?;
    }
    fs::write(path, body).map_err(|e| io_failure(path, e))
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure { code: 2, message: format!("{}: {e}", path.display()) }
}

impl OutputArgs {
    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    pub fn emit(&self, body: &str) -> Result<(), Failure> {
        match &self.output {
            Some(p) => write_file(&resolve(p), body),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(body.as_bytes())?;
                out.flush()?;
                Ok(())
            }
        }
    }
}
