use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};

/// Where rendered tables go: named files in a directory, or stdout.
pub struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
        }
        Ok(Sink { dir })
    }

    pub fn to_files(&self) -> bool {
        self.dir.is_some()
    }

    /// Writes `content` to `<dir>/<name>`, or prints it when no directory
    /// was given.
    pub fn emit(&self, name: &str, content: &str) -> Result<()> {
        match &self.dir {
            Some(d) => {
                let path = d.join(name);
                fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
                log::info!("wrote {}", path.display());
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(content.as_bytes()).context("writing to stdout")?;
            }
        }
        Ok(())
    }
}

/// File-name friendly tau, e.g. `0.50`.
pub fn tau_tag(tau: f64) -> String {
    format!("{tau:.2}")
}
