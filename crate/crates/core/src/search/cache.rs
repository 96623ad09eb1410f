//! File-backed search cache: `<dir>/<provider>/<sha256(provider, query)>.json`.
//!
//! Reads go straight to disk; writes land in a temp file that is renamed into
//! place, so concurrent readers never observe a partial entry.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ProviderError, SearchProvider, SearchResult};

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    provider: String,
    query: String,
    results: Vec<SearchResult>,
}

pub struct CachedSearch<P> {
    inner: P,
    dir: PathBuf,
    write_lock: Mutex<()>,
}

impl<P: SearchProvider> CachedSearch<P> {
    pub fn new(inner: P, dir: impl Into<PathBuf>) -> Self {
        CachedSearch {
            inner,
            dir: dir.into(),
            write_lock: Mutex::new(()),
        }
    }

    pub fn entry_path(&self, query: &str) -> PathBuf {
        let provider = self.inner.id();
        let mut hasher = Sha256::new();
        hasher.update(provider.as_bytes());
        hasher.update([0u8]);
        hasher.update(query.as_bytes());
        let name = format!("{}.json", hex::encode(hasher.finalize()));
        self.dir.join(sanitize(provider)).join(name)
    }

    fn read(&self, path: &Path, query: &str) -> Option<Vec<SearchResult>> {
        let text = fs::read_to_string(path).ok()?;
        match serde_json::from_str::<CacheEntry>(&text) {
            Ok(entry) if entry.query == query && entry.provider == self.inner.id() => Some(entry.results),
            Ok(_) => None,
            Err(e) => {
                log::warn!("ignoring unreadable cache entry {}: {e}", path.display());
                None
            }
        }
    }

    fn write(&self, path: &Path, query: &str, results: &[SearchResult]) -> io::Result<()> {
        let entry = CacheEntry {
            provider: self.inner.id().to_string(),
            query: query.to_string(),
            results: results.to_vec(),
        };
        let body = serde_json::to_vec_pretty(&entry).map_err(io::Error::other)?;
        let _guard = self.write_lock.lock().unwrap_or_else(|p| p.into_inner());
        let parent = path.parent().expect("cache entries live in a provider directory");
        fs::create_dir_all(parent)?;
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, body)?;
        fs::rename(&tmp, path)
    }
}

fn sanitize(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

impl<P: SearchProvider> SearchProvider for CachedSearch<P> {
    fn id(&self) -> &str {
        self.inner.id()
    }

    fn search(&self, query: &str) -> Result<Vec<SearchResult>, ProviderError> {
        let path = self.entry_path(query);
        if let Some(results) = self.read(&path, query) {
            return Ok(results);
        }
        let results = self.inner.search(query)?;
        if let Err(e) = self.write(&path, query, &results) {
            log::warn!("could not write cache entry {}: {e}", path.display());
        }
        Ok(results)
    }
}
