//! Per-prime cache of supersingular class sets.
//!
//! One file per (p, cache version), holding exactly the `enumerate` JSON.
//! Entries are re-validated on load; an entry that fails validation is an
//! error rather than a silent miss, since it means the directory is corrupt.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::field::PrimeModulus;
use crate::json::{self, ClassSetJson};
use crate::supersingular::{enumerate, SupersingularClassSet};

/// Bumped whenever class ordering or the field representation changes.
pub const CACHE_VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "-r1");

#[derive(Debug, Clone)]
pub struct ClassCache {
    dir: PathBuf,
}

impl ClassCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ClassCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, p: PrimeModulus) -> PathBuf {
        self.dir.join(format!("classes-v{CACHE_VERSION}-p{p}.json"))
    }

    pub fn load(&self, p: PrimeModulus) -> Result<Option<SupersingularClassSet>> {
        let path = self.path_for(p);
        if !path.is_file() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path).map_err(|source| io_err(&path, source))?;
        let parsed: ClassSetJson = json::from_str(text.trim_end())?;
        if parsed.p != p.get() {
            return Err(Error::DataCorruption(format!(
                "{} holds the class set for p = {}",
                path.display(),
                parsed.p
            )));
        }
        parsed.into_class_set().map(Some)
    }

    pub fn store(&self, cs: &SupersingularClassSet) -> Result<()> {
        fs::create_dir_all(&self.dir).map_err(|source| io_err(&self.dir, source))?;
        let path = self.path_for(cs.p());
        let text = json::to_string(&ClassSetJson::from(cs)) + "\n";
        fs::write(&path, text).map_err(|source| io_err(&path, source))
    }

    /// Cached class set, enumerating and storing it on a miss.
    pub fn get_or_enumerate(&self, p: PrimeModulus) -> Result<SupersingularClassSet> {
        if let Some(cs) = self.load(p)? {
            return Ok(cs);
        }
        let cs = enumerate(p)?;
        self.store(&cs)?;
        Ok(cs)
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}
