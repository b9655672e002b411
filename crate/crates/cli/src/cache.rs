//! On-disk result cache: one JSON document per key, written with an atomic
//! rename so concurrent runs never see a torn entry.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::record::Record;

const VERSION: &str = "qtv-cache-v1";

pub struct Cache {
    dir: PathBuf,
    pub hits: u64,
    pub misses: u64,
}

/// Hex SHA-256 of the key parts, length-prefixed so no two part lists collide.
pub fn key(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    h.update(VERSION.as_bytes());
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    hex::encode(h.finalize())
}

impl Cache {
    pub fn open(dir: impl Into<PathBuf>) -> std::io::Result<Cache> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Cache { dir, hits: 0, misses: 0 })
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// A missing or unreadable entry counts as a miss.
    pub fn get(&mut self, key: &str) -> Option<Record> {
        let rec = fs::read(self.path(key))
            .ok()
            .and_then(|b| serde_json::from_slice(&b).ok())
            .and_then(|v| Record::from_cache_json(&v));
        match rec {
            Some(_) => self.hits += 1,
            None => self.misses += 1,
        }
        rec
    }

    pub fn put(&self, key: &str, rec: &Record) -> std::io::Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        serde_json::to_writer(&mut tmp, &rec.to_cache_json())?;
        tmp.flush()?;
        tmp.persist(self.path(key)).map_err(|e| e.error)?;
        Ok(())
    }
}
