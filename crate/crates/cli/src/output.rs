//! Staged output files: everything is written under a temporary name and
//! renamed into place only when the whole command succeeds.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

pub struct Outputs {
    dir: PathBuf,
    staged: Vec<(PathBuf, PathBuf)>,
    committed: bool,
    /// Set when this run created the directory, so a failed run can remove it.
    created_dir: bool,
}

impl Outputs {
    /// The directory is created on the first write.
    pub fn new(dir: &Path) -> Result<Self> {
        Ok(Self { dir: dir.to_path_buf(), staged: Vec::new(), committed: false, created_dir: false })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        if !self.dir.exists() {
            fs::create_dir_all(&self.dir).with_context(|| format!("creating output directory {}", self.dir.display()))?;
            self.created_dir = true;
        }
        let target = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.partial"));
        fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
        self.staged.push((tmp, target));
        Ok(())
    }

    /// Moves staged files into place and returns their final paths.
    pub fn commit(mut self) -> Result<Vec<PathBuf>> {
        let mut done = Vec::new();
        for (tmp, target) in &self.staged {
            fs::rename(tmp, target).with_context(|| format!("moving {} into place", target.display()))?;
            done.push(target.clone());
        }
        self.committed = true;
        Ok(done)
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        if !self.committed {
            for (tmp, _) in &self.staged {
                let _ = fs::remove_file(tmp);
            }
            if self.created_dir {
                let _ = fs::remove_dir(&self.dir);
            }
        }
    }
}

/// Serializes rows with a header into CSV bytes.
pub fn csv_bytes<S: AsRef<str>>(header: &[&str], rows: &[Vec<S>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|s| s.as_ref()))?;
    }
    w.into_inner().context("flushing csv")
}

/// Float formatting for CSV cells: shortest round-trip, empty when absent.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uncommitted_files_are_removed() {
        let dir = tempfile::tempdir().unwrap();
        {
            let mut o = Outputs::new(dir.path()).unwrap();
            o.write("a.csv", b"x\n").unwrap();
        }
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
        let fresh = dir.path().join("new");
        {
            let mut o = Outputs::new(&fresh).unwrap();
            o.write("a.csv", b"x\n").unwrap();
        }
        assert!(!fresh.exists());
        let mut o = Outputs::new(dir.path()).unwrap();
        o.write("a.csv", b"x\n").unwrap();
        o.commit().unwrap();
        assert_eq!(fs::read(dir.path().join("a.csv")).unwrap(), b"x\n");
    }
}
