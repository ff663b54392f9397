use crate::{CliError, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

pub fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Collects output files and records their hashes in write order.
pub struct OutputDir {
    root: PathBuf,
    manifest: Vec<FileEntry>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|source| CliError::Io {
            path: root.to_path_buf(),
            source,
        })?;
        Ok(Self {
            root: root.to_path_buf(),
            manifest: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &[u8]) -> Result<()> {
        self.write_unlisted(name, contents)?;
        self.manifest.push(FileEntry {
            name: name.to_string(),
            sha256: sha256_hex(contents),
        });
        Ok(())
    }

    /// Writes without adding a manifest entry (used for the report itself).
    pub fn write_unlisted(&self, name: &str, contents: &[u8]) -> Result<()> {
        let path = self.root.join(name);
        std::fs::write(&path, contents).map_err(|source| CliError::Io { path, source })
    }

    pub fn manifest(&self) -> &[FileEntry] {
        &self.manifest
    }
}

/// File name without directories, for echoing inputs in reports.
pub fn display_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// `asset,x1,...,xk[,label]` rows for a coordinate matrix.
pub fn coords_csv(labels: &[String], coords: &nalgebra::DMatrix<f64>, groups: Option<&[String]>) -> String {
    let mut out = String::from("asset");
    for k in 0..coords.ncols() {
        let _ = write!(out, ",x{}", k + 1);
    }
    if groups.is_some() {
        out.push_str(",label");
    }
    out.push('\n');
    for (i, l) in labels.iter().enumerate() {
        out.push_str(l);
        for k in 0..coords.ncols() {
            let _ = write!(out, ",{}", coords[(i, k)]);
        }
        if let Some(g) = groups {
            let _ = write!(out, ",{}", g[i]);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_of_empty_input() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}
