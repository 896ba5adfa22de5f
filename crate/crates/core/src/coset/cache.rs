//! On-disk cache of double-coset decompositions.
//!
//! One JSON file per decomposition, named by a SHA-256 digest of the
//! prime, level, torus exponents, depth and format version. Files are written
//! to a temporary name and renamed into place. Entries that fail to parse or
//! carry another version are ignored and recomputed.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{DoubleCosetDecomposition, Level};
use crate::error::{Error, Result};
use crate::group::{mat_zero, GroupElement, TorusElement};
use crate::scalar::rational::{format_rational, parse_rational};

pub const CACHE_VERSION: u32 = 1;
pub const CACHE_ENV: &str = "GSP4_CACHE";
pub const DEFAULT_DIR: &str = ".gsp4cache";

#[derive(Serialize, Deserialize)]
struct Entry {
    version: u32,
    prime: u32,
    level: Level,
    t: [i32; 3],
    depth: u32,
    reps: Vec<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Cache {
        Cache { dir: dir.into() }
    }

    /// `$GSP4_CACHE`, or `.gsp4cache/` in the working directory.
    pub fn from_env() -> Cache {
        Cache::new(std::env::var_os(CACHE_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_DIR)))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(prime: u32, level: &Level, t: &TorusElement, depth: u32) -> String {
        let mut h = Sha256::new();
        h.update(format!("v{CACHE_VERSION}|p{prime}|{}|{:?}|d{depth}", level.name(), t.exps()));
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn load(&self, prime: u32, level: &Level, t: &TorusElement, depth: u32) -> Option<DoubleCosetDecomposition> {
        let text = fs::read_to_string(self.path(&Cache::key(prime, level, t, depth))).ok()?;
        let e: Entry = serde_json::from_str(&text).ok()?;
        if e.version != CACHE_VERSION || e.prime != prime || e.level != *level || e.t != t.exps() || e.depth != depth {
            return None;
        }
        let mut reps = Vec::with_capacity(e.reps.len());
        for r in &e.reps {
            if r.len() != 16 {
                return None;
            }
            let mut m = mat_zero();
            for (k, s) in r.iter().enumerate() {
                m[k / 4][k % 4] = parse_rational(s).ok()?;
            }
            reps.push(GroupElement::new(m).ok()?);
        }
        Some(DoubleCosetDecomposition { t: *t, level: *level, prime, depth, reps })
    }

    pub fn store(&self, d: &DoubleCosetDecomposition) -> Result<()> {
        fs::create_dir_all(&self.dir).map_err(|e| Error::Cache(e.to_string()))?;
        let entry = Entry {
            version: CACHE_VERSION,
            prime: d.prime,
            level: d.level,
            t: d.t.exps(),
            depth: d.depth,
            reps: d.reps.iter().map(|g| g.matrix().iter().flatten().map(format_rational).collect()).collect(),
        };
        let key = Cache::key(d.prime, &d.level, &d.t, d.depth);
        let tmp = self.dir.join(format!(".{key}.{}.tmp", std::process::id()));
        let text = serde_json::to_string(&entry).map_err(|e| Error::Cache(e.to_string()))?;
        fs::write(&tmp, text).map_err(|e| Error::Cache(e.to_string()))?;
        fs::rename(&tmp, self.path(&key)).map_err(|e| Error::Cache(e.to_string()))
    }

    /// Cached entry files.
    pub fn entries(&self) -> Vec<PathBuf> {
        let mut out: Vec<PathBuf> = fs::read_dir(&self.dir)
            .map(|rd| rd.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|x| x == "json")).collect())
            .unwrap_or_default();
        out.sort();
        out
    }

    /// Remove all entries; returns how many were removed.
    pub fn clear(&self) -> Result<usize> {
        let entries = self.entries();
        for p in &entries {
            fs::remove_file(p).map_err(|e| Error::Cache(e.to_string()))?;
        }
        Ok(entries.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset::{decompose_cached, decompose_double_coset};

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let t = TorusElement::new(1, 1, 1);
        let lvl = Level::siegel(1);
        let fresh = decompose_double_coset(&t, lvl, 2).unwrap();
        let a = decompose_cached(&cache, &t, lvl, 2).unwrap();
        assert_eq!(*a, *fresh);
        assert_eq!(cache.entries().len(), 1);
        let b = cache.load(2, &lvl, &t, fresh.depth).unwrap();
        assert_eq!(b, *fresh);
        fs::write(&cache.entries()[0], "{ not json").unwrap();
        assert!(cache.load(2, &lvl, &t, fresh.depth).is_none());
        let c = decompose_cached(&cache, &t, lvl, 2).unwrap();
        assert_eq!(*c, *fresh);
        assert_eq!(cache.clear().unwrap(), 1);
    }
}
