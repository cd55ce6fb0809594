use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::CliError;

/// Files of one run, keyed by path relative to the run directory.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Outputs {
    files: BTreeMap<PathBuf, Vec<u8>>,
}

impl Outputs {
    pub fn add(&mut self, rel: impl Into<PathBuf>, bytes: impl Into<Vec<u8>>) {
        self.files.insert(rel.into(), bytes.into());
    }

    pub fn get(&self, rel: impl AsRef<Path>) -> Option<&[u8]> {
        self.files.get(rel.as_ref()).map(Vec::as_slice)
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.files.keys().map(PathBuf::as_path)
    }

    /// Adds `manifest.toml` listing the command, the resolved configuration
    /// and every file with its size.
    pub fn seal(&mut self, command: &str, config_toml: &str) {
        let mut m = format!("command = {command:?}\n\n[files]\n");
        for (path, bytes) in &self.files {
            m.push_str(&format!("{:?} = {}\n", path.to_string_lossy(), bytes.len()));
        }
        m.push_str("\n# resolved configuration\n");
        for line in config_toml.lines() {
            m.push_str(&format!("# {line}\n"));
        }
        self.add("manifest.toml", m);
    }

    /// Writes each file through a temporary sibling and renames it into place.
    pub fn write(&self, root: &Path) -> Result<(), CliError> {
        let err = |p: &Path, e: std::io::Error| CliError::Output(format!("{}: {e}", p.display()));
        for (rel, bytes) in &self.files {
            let path = root.join(rel);
            let dir = path.parent().unwrap_or(root);
            std::fs::create_dir_all(dir).map_err(|e| err(dir, e))?;
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| err(dir, e))?;
            tmp.write_all(bytes).map_err(|e| err(&path, e))?;
            tmp.persist(&path).map_err(|e| err(&path, e.error))?;
        }
        Ok(())
    }
}
