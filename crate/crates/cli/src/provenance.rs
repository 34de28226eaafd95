//! Output headers that record how a file was produced.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use anyhow::{Context, Result};
use emolex::format::Metadata;
use sha2::{Digest, Sha256};

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file
            .read(&mut buf)
            .with_context(|| format!("reading {}", path.display()))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Config echo for one run. Output paths and the worker count are left out:
/// neither changes the content of what is written.
pub struct Header(Metadata);

impl Header {
    pub fn new(command: &str) -> Self {
        let mut m = Metadata::new();
        m.push("command", command);
        Header(m)
    }

    /// Records the path and the content hash of an input file.
    pub fn input(&mut self, key: &str, path: &Path) -> Result<()> {
        self.0.push(key, path.display());
        self.0.push(format!("{key}_sha256"), sha256_file(path)?);
        Ok(())
    }

    pub fn optional_input(&mut self, key: &str, path: Option<&Path>) -> Result<()> {
        match path {
            Some(p) => self.input(key, p),
            None => {
                self.0.push(key, "none");
                Ok(())
            }
        }
    }

    pub fn flag(&mut self, key: &str, value: impl ToString) {
        self.0.push(key, value);
    }

    pub fn into_metadata(self) -> Metadata {
        self.0
    }
}
