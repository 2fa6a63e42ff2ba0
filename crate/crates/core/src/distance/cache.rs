//! On-disk cache of Gram and right-hand-side entries.
//!
//! Each entry is one file: a JSON header line followed by the payload as the
//! hex of the `f64` bit pattern. The header checksum covers the key and the
//! payload; a mismatching or unreadable file is treated as a miss.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::Precision;
use crate::error::{Error, Result};

pub const CACHE_ENV: &str = "BERGMAN_LAB_CACHE";
const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    Gram,
    Rhs,
}

impl EntryKind {
    fn name(self) -> &'static str {
        match self {
            EntryKind::Gram => "gram",
            EntryKind::Rhs => "rhs",
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    version: u32,
    kind: EntryKind,
    j: u64,
    k: u64,
    mode: String,
    truncation: u64,
    checksum: String,
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

fn checksum(kind: EntryKind, j: u64, k: u64, mode: &str, truncation: u64, payload: &str) -> String {
    let mut h = Sha256::new();
    h.update(format!("{}|{j}|{k}|{mode}|{truncation}|{payload}", kind.name()).as_bytes());
    hex::encode(h.finalize())
}

impl Cache {
    /// Opens (creating if needed) a cache rooted at `dir`.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|source| Error::Cache { path: dir.clone(), source })?;
        Ok(Cache { dir })
    }

    /// Cache named by `BERGMAN_LAB_CACHE`, falling back to `dir`.
    pub fn from_env_or(dir: Option<PathBuf>) -> Result<Option<Self>> {
        match std::env::var_os(CACHE_ENV).map(PathBuf::from).or(dir) {
            Some(d) => Ok(Some(Self::open(d)?)),
            None => Ok(None),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn entry_path(&self, kind: EntryKind, j: u64, k: u64, precision: Precision) -> PathBuf {
        self.dir.join(format!("{}-{j}-{k}-{}-{}.entry", kind.name(), precision.mode_name(), precision.truncation()))
    }

    pub fn get(&self, kind: EntryKind, j: u64, k: u64, precision: Precision) -> Option<f64> {
        let path = self.entry_path(kind, j, k, precision);
        let text = fs::read_to_string(&path).ok()?;
        let mut lines = text.lines();
        let header: Header = serde_json::from_str(lines.next()?).ok()?;
        let payload = lines.next()?.trim();
        let mode = precision.mode_name();
        let truncation = precision.truncation();
        let valid = header.version == FORMAT_VERSION
            && header.kind == kind
            && (header.j, header.k) == (j, k)
            && header.mode == mode
            && header.truncation == truncation
            && header.checksum == checksum(kind, j, k, mode, truncation, payload);
        if !valid {
            log::warn!("discarding corrupt cache entry {}", path.display());
            return None;
        }
        let bits = u64::from_str_radix(payload, 16).ok()?;
        Some(f64::from_bits(bits))
    }

    /// Writes an entry atomically: a temporary file in the cache directory is
    /// renamed over the target.
    pub fn put(&self, kind: EntryKind, j: u64, k: u64, precision: Precision, value: f64) -> Result<()> {
        let path = self.entry_path(kind, j, k, precision);
        let payload = format!("{:016x}", value.to_bits());
        let mode = precision.mode_name();
        let truncation = precision.truncation();
        let header = Header {
            version: FORMAT_VERSION,
            kind,
            j,
            k,
            mode: mode.to_string(),
            truncation,
            checksum: checksum(kind, j, k, mode, truncation, &payload),
        };
        let io_err = |source| Error::Cache { path: path.clone(), source };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(io_err)?;
        let line = serde_json::to_string(&header).expect("header serializes");
        writeln!(tmp, "{line}\n{payload}").map_err(io_err)?;
        tmp.persist(&path).map_err(|e| io_err(e.error))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        let p = Precision::Digamma;
        assert_eq!(cache.get(EntryKind::Gram, 2, 3, p), None);
        cache.put(EntryKind::Gram, 2, 3, p, 0.123456789).unwrap();
        assert_eq!(cache.get(EntryKind::Gram, 2, 3, p), Some(0.123456789));
        assert_eq!(cache.get(EntryKind::Rhs, 2, 3, p), None);
        assert_eq!(cache.get(EntryKind::Gram, 2, 3, Precision::Direct { truncation: 10 }), None);
    }

    #[test]
    fn corruption_is_a_miss() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        let p = Precision::Direct { truncation: 1000 };
        cache.put(EntryKind::Rhs, 0, 5, p, 1.5).unwrap();
        let path = cache.entry_path(EntryKind::Rhs, 0, 5, p);
        let text = fs::read_to_string(&path).unwrap();
        let tampered = text.replace(&format!("{:016x}", 1.5f64.to_bits()), &format!("{:016x}", 2.5f64.to_bits()));
        fs::write(&path, tampered).unwrap();
        assert_eq!(cache.get(EntryKind::Rhs, 0, 5, p), None);
        fs::write(&path, "garbage").unwrap();
        assert_eq!(cache.get(EntryKind::Rhs, 0, 5, p), None);
    }

    #[test]
    fn unwritable_directory_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("plain-file");
        fs::write(&file, "x").unwrap();
        assert!(matches!(Cache::open(&file), Err(Error::Cache { .. })));
    }
}
