//! Output directories whose manifest lists every emitted file with its digest.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use tomgame_core::Result;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Tracks files written under one root.
#[derive(Debug)]
pub struct Bundle {
    root: PathBuf,
    files: Vec<String>,
}

impl Bundle {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root)?;
        Ok(Bundle {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Path for `name` inside the bundle, recorded for the manifest.
    pub fn track(&mut self, name: &str) -> PathBuf {
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
        self.root.join(name)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let path = self.track(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn entries(&self) -> Result<Vec<FileEntry>> {
        let mut names = self.files.clone();
        names.sort();
        names
            .into_iter()
            .map(|name| {
                let p = self.root.join(&name);
                Ok(FileEntry {
                    bytes: std::fs::metadata(&p)?.len(),
                    sha256: sha256_file(&p)?,
                    path: name,
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_known_content() {
        let dir = tempfile::tempdir().unwrap();
        let mut b = Bundle::create(dir.path()).unwrap();
        std::fs::write(b.track("x.txt"), "abc").unwrap();
        let e = b.entries().unwrap();
        assert_eq!(e[0].sha256, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        assert_eq!(e[0].bytes, 3);
    }
}
