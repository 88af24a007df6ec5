//! Content-addressed on-disk cache for constructed matrices and ranks.
//!
//! Layout: `<dir>/<algebra hash>/<construction>-<level>.mat` holding the
//! matrix in triple format, and `.rank` files holding a single integer.
//! Writes go to a temporary file first and are renamed into place.

use std::path::{Path, PathBuf};
use std::sync::RwLock;

use crate::algebra::Algebra;
use crate::error::Result;
use crate::linalg::SparseMatrix;

static DIR: RwLock<Option<PathBuf>> = RwLock::new(None);

pub fn set_dir(dir: Option<PathBuf>) {
    *DIR.write().unwrap() = dir;
}

pub fn dir() -> Option<PathBuf> {
    DIR.read().unwrap().clone()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Key {
    pub algebra: String,
    pub construction: String,
    pub level: usize,
}

impl Key {
    pub fn new(a: &Algebra, construction: &str, level: usize) -> Self {
        Key { algebra: a.hash(), construction: construction.to_string(), level }
    }

    fn path(&self, dir: &Path, ext: &str) -> PathBuf {
        let name: String = self
            .construction
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
            .collect();
        dir.join(&self.algebra).join(format!("{name}-{}.{ext}", self.level))
    }
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let parent = path.parent().expect("cache paths have a parent");
    std::fs::create_dir_all(parent)?;
    let tmp = parent.join(format!(".{}.{}.tmp", path.file_name().unwrap().to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Returns the cached matrix for `key`, building and storing it on a miss.
pub fn matrix(key: Key, build: impl FnOnce() -> Result<SparseMatrix>) -> Result<SparseMatrix> {
    let Some(dir) = dir() else {
        return build();
    };
    let path = key.path(&dir, "mat");
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Ok(m) = SparseMatrix::from_text(&text) {
            return Ok(m);
        }
    }
    let m = build()?;
    write_atomic(&path, &m.to_text())?;
    Ok(m)
}

pub fn rank(key: Key, compute: impl FnOnce() -> Result<usize>) -> Result<usize> {
    let Some(dir) = dir() else {
        return compute();
    };
    let path = key.path(&dir, "rank");
    if let Some(r) = std::fs::read_to_string(&path).ok().and_then(|t| t.trim().parse().ok()) {
        return Ok(r);
    }
    let r = compute()?;
    write_atomic(&path, &format!("{r}\n"))?;
    Ok(r)
}
