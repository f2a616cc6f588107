use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Stages artifacts as hidden temp files in the output directory and
/// renames them into place on [`commit`](ArtifactWriter::commit). Dropping
/// an uncommitted writer deletes everything it staged.
#[derive(Debug)]
pub struct ArtifactWriter {
    dir: PathBuf,
    staged: Vec<(PathBuf, PathBuf)>,
    committed: bool,
}

impl ArtifactWriter {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(ArtifactWriter {
            dir: dir.to_path_buf(),
            staged: Vec::new(),
            committed: false,
        })
    }

    pub fn bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let tmp = self.dir.join(format!(".{name}.tmp"));
        fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
        self.staged.push((tmp, self.dir.join(name)));
        Ok(())
    }

    /// Writes `rows` as `<stem>.csv` (header from field names) or
    /// `<stem>.json` (array of objects).
    pub fn table<T: Serialize>(&mut self, stem: &str, rows: &[T], format: OutputFormat) -> Result<()> {
        let bytes = match format {
            OutputFormat::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                for row in rows {
                    w.serialize(row)?;
                }
                w.into_inner().map_err(|e| Error::io(stem, e.into_error()))?
            }
            OutputFormat::Json => {
                let mut v = serde_json::to_vec_pretty(rows)?;
                v.push(b'\n');
                v
            }
        };
        self.bytes(&format!("{stem}.{}", format.extension()), &bytes)
    }

    /// Renames every staged file into place and returns the final paths.
    pub fn commit(mut self) -> Result<Vec<PathBuf>> {
        let mut done = Vec::new();
        for (tmp, dest) in &self.staged {
            if let Err(e) = fs::rename(tmp, dest) {
                for p in &done {
                    let _ = fs::remove_file(p);
                }
                return Err(Error::io(dest, e));
            }
            done.push(dest.clone());
        }
        self.committed = true;
        Ok(done)
    }
}

impl Drop for ArtifactWriter {
    fn drop(&mut self) {
        if !self.committed {
            for (tmp, _) in &self.staged {
                let _ = fs::remove_file(tmp);
            }
        }
    }
}
