//! Content-addressed, write-once on-disk cache for counting results.
//!
//! Each entry is a JSON file named by the SHA-256 of `(module, key)` and
//! carries a schema version; a version mismatch is a hard error.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "QHALL_CACHE_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache entry {path} is corrupt: {msg}")]
    Corrupt { path: String, msg: String },
    #[error("cache entry {path} has schema {found}, expected {expected}")]
    StaleSchema { path: String, found: u32, expected: u32 },
}

#[derive(Serialize, Deserialize)]
struct Entry<T> {
    schema: u32,
    module: String,
    key: String,
    value: T,
}

#[derive(Debug, Clone)]
pub struct CountCache {
    dir: PathBuf,
}

impl CountCache {
    pub fn new(dir: impl AsRef<Path>) -> Result<Self, CacheError> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(Self { dir: dir.as_ref().to_path_buf() })
    }

    /// Cache rooted at `$QHALL_CACHE_DIR`, if set.
    pub fn from_env() -> Option<Self> {
        let d = std::env::var_os(CACHE_ENV)?;
        Self::new(d).ok()
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, module: &str, key: &str) -> PathBuf {
        let mut h = Sha256::new();
        h.update(module.as_bytes());
        h.update([0u8]);
        h.update(key.as_bytes());
        let name = hex::encode(h.finalize());
        self.dir.join(module).join(format!("{}.json", name))
    }

    pub fn get<T: DeserializeOwned>(&self, module: &str, key: &str) -> Result<Option<T>, CacheError> {
        let path = self.path_for(module, key);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let shown = path.display().to_string();
        let raw: serde_json::Value = serde_json::from_slice(&bytes)
            .map_err(|e| CacheError::Corrupt { path: shown.clone(), msg: e.to_string() })?;
        let found = raw.get("schema").and_then(|s| s.as_u64()).unwrap_or(0) as u32;
        if found != SCHEMA_VERSION {
            return Err(CacheError::StaleSchema { path: shown, found, expected: SCHEMA_VERSION });
        }
        let entry: Entry<T> =
            serde_json::from_value(raw).map_err(|e| CacheError::Corrupt { path: shown.clone(), msg: e.to_string() })?;
        if entry.module != module || entry.key != key {
            return Err(CacheError::Corrupt { path: shown, msg: "key collision".into() });
        }
        Ok(Some(entry.value))
    }

    /// Store a value unless an entry already exists (write-once).
    pub fn put<T: Serialize>(&self, module: &str, key: &str, value: &T) -> Result<(), CacheError> {
        let path = self.path_for(module, key);
        if path.exists() {
            return Ok(());
        }
        fs::create_dir_all(path.parent().expect("cache path has a parent"))?;
        let entry = Entry { schema: SCHEMA_VERSION, module: module.to_string(), key: key.to_string(), value };
        let bytes = serde_json::to_vec(&entry).map_err(|e| CacheError::Corrupt {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        let n = TMP_COUNTER.fetch_add(1, Ordering::Relaxed);
        let tmp = path.with_extension(format!("tmp{}-{}", std::process::id(), n));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&bytes)?;
        }
        fs::rename(&tmp, &path)?;
        Ok(())
    }
}
