//! Content-addressed on-disk store for matrices and tables.
//!
//! Entries are keyed by the SHA-256 of (module descriptor, map descriptor, field).
//! Writes go through a temporary file and a rename; unreadable or mismatched
//! entries are treated as misses.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::exactlin::{Field, SparseMatrix};

pub const CACHE_ENV: &str = "FUNHO_CACHE_DIR";
const EXT: &str = "entry";

#[derive(Serialize, Deserialize)]
struct Entry {
    module: String,
    map: String,
    field: String,
    digest: String,
    payload: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheStat {
    pub dir: String,
    pub entries: usize,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheListing {
    pub key: String,
    pub module: Option<String>,
    pub map: Option<String>,
    pub field: Option<String>,
    pub bytes: u64,
    pub valid: bool,
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

fn hex_digest(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    hex::encode(h.finalize())
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    /// `$FUNHO_CACHE_DIR`, else `$XDG_CACHE_HOME/funho`, else `$HOME/.cache/funho`, else `.funho-cache`.
    pub fn default_dir() -> PathBuf {
        if let Some(d) = std::env::var_os(CACHE_ENV).filter(|d| !d.is_empty()) {
            return d.into();
        }
        if let Some(d) = std::env::var_os("XDG_CACHE_HOME").filter(|d| !d.is_empty()) {
            return PathBuf::from(d).join("funho");
        }
        match std::env::var_os("HOME") {
            Some(h) => PathBuf::from(h).join(".cache").join("funho"),
            None => PathBuf::from(".funho-cache"),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(module: &str, map: &str, field: &str) -> String {
        hex_digest(&[module, map, field])
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.{EXT}"))
    }

    fn read_entry(path: &Path) -> Option<Entry> {
        let text = fs::read_to_string(path).ok()?;
        let e: Entry = serde_json::from_str(&text).ok()?;
        (hex_digest(&[&e.payload]) == e.digest).then_some(e)
    }

    pub fn get_text(&self, module: &str, map: &str, field: &str) -> Option<String> {
        let e = Self::read_entry(&self.path(&Self::key(module, map, field)))?;
        (e.module == module && e.map == map && e.field == field).then_some(e.payload)
    }

    pub fn put_text(&self, module: &str, map: &str, field: &str, payload: &str) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let e = Entry {
            module: module.into(),
            map: map.into(),
            field: field.into(),
            digest: hex_digest(&[payload]),
            payload: payload.into(),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(serde_json::to_string(&e)?.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.path(&Self::key(module, map, field)))
            .map_err(|e| e.error)?;
        Ok(())
    }

    pub fn get_matrix<F: Field>(&self, field: &F, module: &str, map: &str) -> Option<SparseMatrix<F>> {
        let text = self.get_text(module, map, &field.kind().to_string())?;
        SparseMatrix::parse_triplets(field, &text).ok()
    }

    pub fn put_matrix<F: Field>(&self, module: &str, map: &str, m: &SparseMatrix<F>) -> Result<()> {
        self.put_text(module, map, &m.field().kind().to_string(), &m.to_triplet_string())
    }

    /// Returns the cached matrix or computes and stores it. A failed store is not an error.
    pub fn matrix_or_compute<F: Field>(
        &self,
        field: &F,
        module: &str,
        map: &str,
        compute: impl FnOnce() -> Result<SparseMatrix<F>>,
    ) -> Result<SparseMatrix<F>> {
        if let Some(m) = self.get_matrix(field, module, map) {
            return Ok(m);
        }
        let m = compute()?;
        let _ = self.put_matrix(module, map, &m);
        Ok(m)
    }

    fn entry_paths(&self) -> Result<Vec<PathBuf>> {
        if !self.dir.exists() {
            return Ok(Vec::new());
        }
        let mut v: Vec<PathBuf> = fs::read_dir(&self.dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == EXT))
            .collect();
        v.sort();
        Ok(v)
    }

    pub fn stat(&self) -> Result<CacheStat> {
        let paths = self.entry_paths()?;
        let bytes = paths.iter().filter_map(|p| fs::metadata(p).ok()).map(|m| m.len()).sum();
        Ok(CacheStat { dir: self.dir.display().to_string(), entries: paths.len(), bytes })
    }

    pub fn list(&self) -> Result<Vec<CacheListing>> {
        Ok(self
            .entry_paths()?
            .into_iter()
            .map(|p| {
                let key = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                let bytes = fs::metadata(&p).map(|m| m.len()).unwrap_or(0);
                match Self::read_entry(&p) {
                    Some(e) => {
                        let valid = Self::key(&e.module, &e.map, &e.field) == key;
                        CacheListing { key, module: Some(e.module), map: Some(e.map), field: Some(e.field), bytes, valid }
                    }
                    None => CacheListing { key, module: None, map: None, field: None, bytes, valid: false },
                }
            })
            .collect())
    }

    /// Removes every entry; returns how many were removed.
    pub fn clear(&self) -> Result<usize> {
        let paths = self.entry_paths()?;
        for p in &paths {
            fs::remove_file(p)?;
        }
        Ok(paths.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::Rationals;

    #[test]
    fn roundtrip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(dir.path());
        assert_eq!(c.stat().unwrap().entries, 0);
        let m = SparseMatrix::from_i64_rows(&Rationals, &[&[1, 2], &[0, -5]]).unwrap();
        c.put_matrix("loday[x]", "d_0@2", &m).unwrap();
        assert_eq!(c.get_matrix(&Rationals, "loday[x]", "d_0@2").unwrap(), m);
        assert!(c.get_matrix(&Rationals, "loday[x]", "d_1@2").is_none());
        assert_eq!(c.stat().unwrap().entries, 1);

        let path = c.path(&Cache::key("loday[x]", "d_0@2", "Q"));
        fs::write(&path, "{ not json").unwrap();
        assert!(c.get_matrix(&Rationals, "loday[x]", "d_0@2").is_none());
        assert!(!c.list().unwrap()[0].valid);
        let mut calls = 0;
        let again = c
            .matrix_or_compute(&Rationals, "loday[x]", "d_0@2", || {
                calls += 1;
                Ok(m.clone())
            })
            .unwrap();
        assert_eq!((again, calls), (m, 1));
        assert!(c.list().unwrap()[0].valid);
        assert_eq!(c.clear().unwrap(), 1);
        assert_eq!(c.stat().unwrap().entries, 0);
    }

    #[test]
    fn tampered_payload_is_a_miss() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(dir.path());
        c.put_text("m", "f", "F2", "1 1 F2\n0 0 1\n").unwrap();
        let path = c.path(&Cache::key("m", "f", "F2"));
        let text = fs::read_to_string(&path).unwrap().replace("0 0 1", "0 0 0");
        fs::write(&path, text).unwrap();
        assert!(c.get_text("m", "f", "F2").is_none());
    }
}
